#include "rda/experiment.hpp"

int main(int argc, char** argv) { return rda::cli_main(argc, argv); }
