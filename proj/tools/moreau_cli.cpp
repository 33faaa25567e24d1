#include <exception>
#include <iostream>

#include "moreau/cli.hpp"

int main(int argc, char** argv) {
  try {
    const moreau::cli::RunConfig cfg = moreau::cli::parse_args(argc, argv);
    return moreau::cli::run_command(cfg);
  } catch (const moreau::cli::HelpRequested& help) {
    std::cout << help.text;
    return 0;
  } catch (const moreau::cli::UsageError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
