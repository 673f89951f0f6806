#pragma once

#include "lpsketch/ecc.hpp"
#include "lpsketch/errors.hpp"
#include "lpsketch/genbench.hpp"
#include "lpsketch/lp_model.hpp"
#include "lpsketch/project.hpp"
#include "lpsketch/retrieve.hpp"
#include "lpsketch/rng.hpp"
#include "lpsketch/sketch.hpp"
#include "lpsketch/solver.hpp"
