#include <vector>

#include "ouswitch/cli_io.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return ouswitch::run_cli(args);
}
