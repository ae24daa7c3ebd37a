#include "decolab/experiment.hpp"

int main(int argc, char** argv) { return decolab::run_cli(argc, argv); }
