#include <iostream>

#include "vegopt/app/app.hpp"

int main(int argc, char** argv) {
  return vegopt::app::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
