#include <pybind11/pybind11.h>
PYBIND11_MODULE(_rmatch, m) { m.doc() = "placeholder"; }
