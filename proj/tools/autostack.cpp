#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"autostackable structure toolkit"};
  app.require_subcommand(0);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 2 : 0;
  }
  std::cout << app.help() << std::flush;
  return 0;
}
