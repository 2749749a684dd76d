#pragma once

#include <stdexcept>
#include <string>

namespace kfs {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define KFS_DECLARE_ERROR(Name)                                   \
    class Name : public Error {                                   \
    public:                                                       \
        explicit Name(const std::string& what) : Error(what) {}   \
    }

KFS_DECLARE_ERROR(InvalidGeometry);
KFS_DECLARE_ERROR(NoPath);
KFS_DECLARE_ERROR(InvalidPattern);
KFS_DECLARE_ERROR(UnpairableColumn);
KFS_DECLARE_ERROR(GaplessSpectrum);
KFS_DECLARE_ERROR(LogBranchAmbiguity);
KFS_DECLARE_ERROR(NotGaussian);
KFS_DECLARE_ERROR(InsufficientSamples);
KFS_DECLARE_ERROR(GaplessGrid);
KFS_DECLARE_ERROR(TooLarge);
KFS_DECLARE_ERROR(SchemaError);
KFS_DECLARE_ERROR(IoError);

// Raised when a runtime physical invariant is violated (densities outside
// [0,1], loss of antisymmetry, non-deterministic stabilizer readout). The
// command-line runner maps it to exit code 3.
KFS_DECLARE_ERROR(InvariantBreach);

#undef KFS_DECLARE_ERROR

}  // namespace kfs
