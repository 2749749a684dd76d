#include "kfs/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <json.hpp>

#include "kfs/errors.hpp"

namespace kfs {

namespace {

using Json = nlohmann::ordered_json;

std::filesystem::path with_suffix(std::filesystem::path stem, const char* ext) {
    stem += ext;
    return stem;
}

Json site_json(const Site& s) {
    return Json{{"row", s.row}, {"col", s.col}, {"sublattice", s.sublattice == Sublattice::Even ? "even" : "odd"}};
}

// Byte-swaps on big-endian hosts so the payload is always little-endian.
void to_little_endian(double& v) {
    if constexpr (std::endian::native == std::endian::big) {
        unsigned char b[sizeof v];
        std::memcpy(b, &v, sizeof v);
        for (std::size_t i = 0; i < sizeof v / 2; ++i) std::swap(b[i], b[sizeof v - 1 - i]);
        std::memcpy(&v, b, sizeof v);
    }
}

}  // namespace

std::string lattice_to_json(const Lattice& L) {
    Json j;
    j["plaquette_rows"] = L.plaquette_rows();
    j["plaquette_cols"] = L.plaquette_cols();
    j["boundary"] = to_string(L.boundary());
    j["num_sites"] = L.num_sites();
    Json sites = Json::array();
    for (const Site& s : L.data_sites()) sites.push_back(site_json(s));
    j["sites"] = std::move(sites);
    Json anc = Json::array();
    for (const Site& s : L.ancilla_sites()) anc.push_back(Json{{"row", s.row}, {"col", s.col}});
    j["ancillas"] = std::move(anc);
    Json links = Json::array();
    for (const Link& l : L.links()) links.push_back(Json{{"a", l.a}, {"b", l.b}, {"type", to_string(l.type)}});
    j["links"] = std::move(links);
    Json plaqs = Json::array();
    for (const Plaquette& p : L.plaquettes())
        plaqs.push_back(Json{{"row", p.row},
                             {"col", p.col},
                             {"sites", p.sites},
                             {"letters", std::string(p.letters.begin(), p.letters.end())}});
    j["plaquettes"] = std::move(plaqs);
    j["columns"] = L.columns();
    j["bulk_region"] = L.bulk_region();
    j["winding_loops"] = L.winding_loops();
    return j.dump(2);
}

std::string gamma_bytes(const CorrelationMatrix& gamma) {
    std::string out;
    out.reserve(static_cast<std::size_t>(gamma.size()) * sizeof(double));
    for (Eigen::Index r = 0; r < gamma.rows(); ++r)
        for (Eigen::Index c = 0; c < gamma.cols(); ++c) {
            double v = gamma(r, c);
            to_little_endian(v);
            out.append(reinterpret_cast<const char*>(&v), sizeof v);
        }
    return out;
}

std::string gamma_sidecar(const CorrelationMatrix& gamma, const Encoding& enc, const std::string& bin_name) {
    Json side;
    side["file"] = bin_name;
    side["dtype"] = "float64";
    side["byte_order"] = "little";
    side["layout"] = "row_major";
    side["shape"] = {gamma.rows(), gamma.cols()};
    Json sites = Json::array();
    for (int m = 0; m < enc.num_majoranas(); ++m) sites.push_back(enc.site_of(m));
    side["majorana_site"] = std::move(sites);
    return side.dump(2) + "\n";
}

void write_gamma(const std::filesystem::path& stem, const CorrelationMatrix& gamma, const Encoding& enc) {
    const auto bin = with_suffix(stem, ".bin");
    std::ofstream out(bin, std::ios::binary);
    if (!out) throw IoError("cannot write " + bin.string());
    out << gamma_bytes(gamma);
    if (!out) throw IoError("short write to " + bin.string());
    std::ofstream js(with_suffix(stem, ".json"));
    if (!js) throw IoError("cannot write sidecar for " + stem.string());
    js << gamma_sidecar(gamma, enc, bin.filename().string());
}

CorrelationMatrix read_gamma(const std::filesystem::path& stem) {
    std::ifstream js(with_suffix(stem, ".json"));
    if (!js) throw IoError("missing sidecar for " + stem.string());
    const Json side = Json::parse(js, nullptr, false);
    if (side.is_discarded() || !side.contains("shape")) throw SchemaError("malformed Gamma sidecar");
    if (side.value("dtype", "") != "float64" || side.value("byte_order", "") != "little")
        throw SchemaError("unsupported Gamma encoding");
    const auto rows = side["shape"].at(0).get<Eigen::Index>();
    const auto cols = side["shape"].at(1).get<Eigen::Index>();

    const auto bin = with_suffix(stem, ".bin");
    if (std::filesystem::file_size(bin) != static_cast<std::uintmax_t>(rows * cols) * sizeof(double))
        throw SchemaError("Gamma payload size does not match its sidecar");
    std::ifstream in(bin, std::ios::binary);
    CorrelationMatrix g(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) {
            double v;
            in.read(reinterpret_cast<char*>(&v), sizeof v);
            to_little_endian(v);
            g(r, c) = v;
        }
    return g;
}

}  // namespace kfs
