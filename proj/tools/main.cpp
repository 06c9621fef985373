#include <iostream>
#include <string>
#include <vector>

#include "pdikit/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    pdikit::CommandResult result = pdikit::run_command(args);
    if (!result.output.empty()) std::cout << result.output;
    if (!result.diagnostics.empty()) std::cerr << result.diagnostics << "\n";
    return result.exit_code;
}
