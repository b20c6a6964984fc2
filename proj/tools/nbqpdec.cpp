#include "nbqp/sim.hpp"

int main(int argc, char** argv) { return nbqp::cli_main(argc, argv); }
