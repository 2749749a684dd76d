#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace kfs {

enum class Sublattice : std::uint8_t { Even, Odd };
enum class LinkType : std::uint8_t { XX, YY, ZZ };
enum class Boundary : std::uint8_t { Cylinder, Open };

char link_letter(LinkType t);
const char* to_string(LinkType t);
const char* to_string(Boundary b);

struct Site {
    int row = 0;
    int col = 0;
    Sublattice sublattice = Sublattice::Even;
    friend bool operator==(const Site&, const Site&) = default;
};

// Endpoints are canonical site indices with a < b.
struct Link {
    int a = 0;
    int b = 0;
    LinkType type = LinkType::ZZ;
};

// Hexagon (i, j). Sites are stored in walk order starting at the Even site
// (i, 2j+2) and moving towards (i, 2j+3), so the letter pattern reads
// X Z Y X Z Y. Each letter is the type of the one link at that site which
// leaves the hexagon.
struct Plaquette {
    int row = 0;
    int col = 0;
    std::array<int, 6> sites{};
    std::array<char, 6> letters{};
};

// Rectangular embedding of the honeycomb. Site (r, c) sits in row r and column
// c; horizontal links alternate YY (c even) and ZZ (c odd); XX links connect
// (r, 2j+1) to (r+1, 2j). Under Cylinder boundary the row index is periodic
// and the XX links are the only ones that cross the seam.
class Lattice {
public:
    int plaquette_rows() const { return prows_; }
    int plaquette_cols() const { return pcols_; }
    Boundary boundary() const { return boundary_; }
    int site_rows() const { return srows_; }
    int site_cols() const { return scols_; }

    int num_sites() const { return static_cast<int>(sites_.size()); }
    const std::vector<Site>& data_sites() const { return sites_; }
    // One ancilla per plaquette; row/col hold the plaquette coordinates.
    const std::vector<Site>& ancilla_sites() const { return ancillas_; }
    const std::vector<Link>& links() const { return links_; }
    const std::vector<Plaquette>& plaquettes() const { return plaquettes_; }
    // columns()[j] lists plaquette indices of column j ordered by row.
    const std::vector<std::vector<int>>& columns() const { return columns_; }
    const std::vector<int>& bulk_region() const { return bulk_; }
    int bulk_col_lo() const { return bulk_lo_; }
    int bulk_col_hi() const { return bulk_hi_; }

    // -1 when (row, col) holds no data site. Rows wrap under Cylinder.
    int index_of(int row, int col) const;
    const Site& site(int idx) const { return sites_[static_cast<std::size_t>(idx)]; }
    // Link index of the link of type t at site s, or -1.
    int link_at(int s, LinkType t) const;
    // Link index joining a and b, or -1.
    int link_between(int a, int b) const;
    int plaquette_index(int row, int col) const;
    bool contains_site(int plaquette, int s) const;

    // Z-only loops winding the cylinder: loop k covers columns 2k and 2k+1.
    // Empty under Open boundary.
    std::vector<std::vector<int>> winding_loops() const;

    // Unit cell (r, j) is the ZZ dimer: e = (r, 2j+2) (lambda 0) and
    // o = (r, 2j+1) (lambda 1), for j in [0, plaquette_cols()).
    int cell_cols() const { return pcols_; }
    int cell_site(int r, int j, int lambda) const { return index_of(r, 2 * j + 2 - lambda); }

private:
    friend Lattice build_lattice(int, int, Boundary);

    int prows_ = 0, pcols_ = 0, srows_ = 0, scols_ = 0;
    Boundary boundary_ = Boundary::Cylinder;
    std::vector<Site> sites_;
    std::vector<Site> ancillas_;
    std::vector<Link> links_;
    std::vector<Plaquette> plaquettes_;
    std::vector<std::vector<int>> columns_;
    std::vector<int> bulk_;
    int bulk_lo_ = 0, bulk_hi_ = -1;
    std::vector<int> grid_;                    // (r, c) -> index or -1
    std::vector<std::array<int, 3>> link_of_;  // site -> link per type
};

// rows_of_plaquettes x cols hexagons. Cylinder needs an even number of rows
// of at least 2; Open accepts any positive size. Throws InvalidGeometry.
Lattice build_lattice(int rows_of_plaquettes, int cols, Boundary boundary);

// 4 x 8 plaquettes on a cylinder: 72 data sites, 32 ancillas.
Lattice default_lattice();
// One hexagon, six data sites.
Lattice single_plaquette();

// Complex fermions live on ZZ dimers (r, 2j+1)-(r, 2j+2). Sites without a ZZ
// link (the degree-2 ends of each row) are reported separately.
struct ComplexFermionSites {
    std::vector<std::pair<int, int>> pairs;  // (odd-column site, even-column site)
    std::vector<int> unpaired;
    int grid_rows = 0;
    int grid_cols = 0;
    // pair index of dimer (r, j), or -1.
    int pair_at(int r, int j) const;
    std::vector<std::pair<int, int>> grid_coords;  // per pair: (r, j)
};
ComplexFermionSites complex_fermion_sites(const Lattice& lattice);

struct JwPath {
    std::vector<int> order;  // sites in visiting order
    std::vector<int> links;  // links[k] joins order[k] and order[k+1]
};
// Cylinder: walk each ring of columns (2k, 2k+1) and step to the next ring
// through a ZZ link, starting at (0, 0). Open: depth-first Hamiltonian path
// search from the first site. Throws NoPath when no path exists.
JwPath jw_path(const Lattice& lattice);

}  // namespace kfs
