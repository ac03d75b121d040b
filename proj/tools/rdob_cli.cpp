#include "rdob/cli_app.hpp"

int main(int argc, char** argv) { return rdob::cli::run(argc, argv); }
