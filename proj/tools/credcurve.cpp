#include "app.hpp"

int main(int argc, char** argv) { return credcurve::app::run(argc, argv); }
