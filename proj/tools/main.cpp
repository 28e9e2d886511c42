#include <vector>

#include "fbsplit/bench.hpp"

int main(int argc, char** argv) {
    return fbsplit::cli_main(std::vector<std::string>(argv + 1, argv + argc));
}
