#include <iostream>

#include "bqr/app.hpp"

int main(int argc, char** argv) { return bqr::app::run_command(argc, argv, std::cout, std::cerr); }
