#include "qfield/cli.hpp"

int main(int argc, char** argv) { return qfield::cli::run(argc, argv); }
