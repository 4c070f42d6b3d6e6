// Writes the grid-oracle reference for the symmetric two-source instance:
// sources (-1,1), (1,1) with unit flows, sink (0,-1), w(t) = 1 + t, Euclidean.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <gilbert/oracle.hpp>

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: gilbert_make_golden <output.json>\n";
    return 1;
  }
  gilbert::Instance inst;
  inst.weight = {1.0, 1.0};
  gilbert::Vector a(2), b(2), q(2);
  a << -1.0, 1.0;
  b << 1.0, 1.0;
  q << 0.0, -1.0;
  inst.sources = {{a, 1.0}, {b, 1.0}};
  inst.sink = q;

  const int resolution = 2000;
  const gilbert::OracleResult g = gilbert::grid_solve(inst, resolution);
  const gilbert::Vector& s = g.arborescence.vertices.back().position;
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "{\n  \"resolution\": %d,\n  \"spacing\": %.17g,\n  \"bound\": %.17g,\n  \"cost\": %.17g,\n"
                "  \"steiner\": [%.17g, %.17g]\n}\n",
                resolution, g.spacing, g.bound, g.cost, s[0], s[1]);
  std::ofstream(argv[1]) << buf;
  std::cout << buf;
  return 0;
}
