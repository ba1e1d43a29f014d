#include "lymphnet/cli.hpp"

int main(int argc, char** argv) { return lymphnet::dispatch(argc, argv); }
