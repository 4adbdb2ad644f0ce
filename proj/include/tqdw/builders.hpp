#pragma once

#include <random>

#include "tqdw/cellcomplex.hpp"

namespace tqdw {

// Standard cubic lattice with axes identified with the cube representative
// in the order (x, z, y); roles: v, ex/ey/ez, bx/by/bz (face normal), cc.
CellComplex build_cubic(int lx, int ly, int lz, std::array<bool, 3> periodic);

// Sheared spacetime lattice (stabilizer circuits): unit vectors
// x0 = t-x, x1 = y, x2 = -t on the (x,y,t) grid. Plain variant has roles
// v, dx/y/t edges, b/fxt/fyt faces, cc cubes. The triangulated variant adds
// the diagonal edges x, dy and splits the t-like quads into tri1..tri4.
CellComplex build_sheared(int l, int lt, bool with_diagonals,
                          std::array<bool, 3> periodic = {true, true, true});

// Floquet lattice: cubic with every edge doubled through a 2-gon and every
// square face split by a diagonal 2-valent edge. with_diagonals=false gives
// the complex used for cup products (squares unsplit, no diagonal edges).
CellComplex build_modified_cubic(int lx, int ly, int lz, bool with_diagonals,
                                 std::array<bool, 3> periodic = {true, true, true});

// Representative complexes as standalone objects.
CellComplex build_representative(const std::string& name);

// Random triangulated 3-ball grown by repeated 1->4 subdivisions; vertices
// are globally ordered so a branching structure exists.
CellComplex build_random_ball(std::mt19937_64& rng, int moves);

// kind dispatcher per the CLI surface
CellComplex build_lattice(const std::string& kind, std::vector<int> sizes,
                          std::array<bool, 3> periodic);

// All cells within edge-path radius of the seeds: a cell is included iff
// every vertex of it lies within the radius. Face-closed by construction.
SubcomplexSelection neighborhood(const CellComplex& m, const std::vector<CellRef>& seeds,
                                 int radius);

// Closure of all cells whose closure meets the seeds (closed star).
SubcomplexSelection closed_star(const CellComplex& m, const std::vector<CellRef>& seeds);

// New complex from a face-closed selection; cells keep ids/reps.
CellComplex restrict_complex(const CellComplex& m, const SubcomplexSelection& sel);

// Cells of the topological boundary (cells all of whose top-degree cofaces
// count is below the interior count), grouped into connected components.
std::vector<std::set<CellRef>> boundary_components(const CellComplex& m);

// vertices not contained in any boundary cell
std::set<int> interior_vertices(const CellComplex& m);
std::set<CellRef> boundary_cells(const CellComplex& m);

std::string complex_to_json(const CellComplex& m);
CellComplex complex_from_json(const std::string& text);

} // namespace tqdw
