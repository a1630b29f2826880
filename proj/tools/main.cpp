#include "cli.hpp"

int main(int argc, char** argv) { return oamfso::cli::run(argc, argv); }
