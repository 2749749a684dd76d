#pragma once

#include <filesystem>
#include <string>

#include "kfs/encoding.hpp"
#include "kfs/gaussian.hpp"
#include "kfs/lattice.hpp"

namespace kfs {

// Sites, ancillas, links, plaquettes (with letters), columns and bulk region.
std::string lattice_to_json(const Lattice& lattice);

// Raw payload and JSON sidecar of a Gamma dump, for callers that collect
// output files in memory.
std::string gamma_bytes(const CorrelationMatrix& gamma);
std::string gamma_sidecar(const CorrelationMatrix& gamma, const Encoding& enc, const std::string& bin_name);

// Writes `<stem>.bin` (row-major little-endian float64) and `<stem>.json`
// with shape, dtype, byte order and the Majorana-to-site map.
void write_gamma(const std::filesystem::path& stem, const CorrelationMatrix& gamma, const Encoding& enc);
// Reads a dump back, checking the sidecar shape against the payload size.
CorrelationMatrix read_gamma(const std::filesystem::path& stem);

}  // namespace kfs
