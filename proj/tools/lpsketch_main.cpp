#include "lpsketch/cli.hpp"

int main(int argc, char** argv) {
    return lpsketch::dispatch(std::vector<std::string>(argv + 1, argv + argc));
}
