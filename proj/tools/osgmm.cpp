#include "commands.hpp"

int main(int argc, char** argv) { return osgmm::cli::run(argc, argv); }
