#include "gravcam/cli.hpp"

int main(int argc, char** argv) { return gravcam::cli::run(argc, argv); }
