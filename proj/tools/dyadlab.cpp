#include "dyad/run.hpp"

int main(int argc, char** argv) { return dyad::cli::main_entry(argc, argv); }
