#include <iostream>
#include <string>
#include <vector>

#include "mlenv/cli/commands.hpp"
#include "mlenv/cli/parse.hpp"
#include "mlenv/cli/registry.hpp"
#include "mlenv/version.hpp"

namespace {

void print_usage(std::ostream& os) {
    os << "usage: mlenv <command> [flags]\n"
          "\n"
          "commands:\n"
          "  train   fit a model and score the test split\n"
          "  test    score a saved checkpoint on the test split\n"
          "  tune    search hyperparameters, one training run per trial\n"
          "\n"
          "run `mlenv <command> --help` for the command's flags,\n"
          "`mlenv --version` for the framework version.\n";
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty()) {
        print_usage(std::cerr);
        return 2;
    }

    const std::string& first = args.front();
    if (first == "--version" || first == "-v") {
        std::cout << "mlenv " << mlenv::kVersion << "\n";
        return 0;
    }
    if (first == "--help" || first == "-h" || first == "help") {
        print_usage(std::cout);
        return 0;
    }
    if (first != "train" && first != "test" && first != "tune") {
        std::cerr << "error: unknown command '" << first << "'\n\n";
        print_usage(std::cerr);
        return 2;
    }

    std::vector<std::string> rest(args.begin() + 1, args.end());
    for (const auto& arg : rest) {
        if (arg == "--help" || arg == "-h") {
            std::cout << mlenv::cli::help_text(first, mlenv::cli::builtin_registry());
            return 0;
        }
    }
    return mlenv::cli::run_command(first, rest, mlenv::cli::builtin_registry(), std::cout,
                                   std::cerr);
}
