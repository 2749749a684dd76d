#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <memory>

#include "kfs/errors.hpp"
#include "kfs/protocols.hpp"

namespace kfs {

namespace {

struct Objective {
    const Encoding* enc;
    const StringTable* target;
    const StringTableBuilder* builder;
    const CorrelationMatrix* vacuum;
    std::string bases;
    int evaluations = 0;

    double overlap(const gsl_vector* x) {
        ++evaluations;
        PhasePrepSpec spec{bases, std::vector<double>(bases.size())};
        for (std::size_t k = 0; k < bases.size(); ++k) spec.angles[k] = gsl_vector_get(x, k);
        CorrelationMatrix g = *vacuum;
        for (const Layer& l : phase_prep_circuit(enc->lattice(), spec)) apply_layer(g, *enc, l);
        return table_overlap(builder->average(g), *target);
    }
};

double negated_overlap(const gsl_vector* x, void* params) { return -static_cast<Objective*>(params)->overlap(x); }

struct MinimizerDeleter {
    void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};
struct VectorDeleter {
    void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};

}  // namespace

OptimizeResult optimize_prep_angles(const Encoding& enc, const StringTable& target, const std::string& bases,
                                    int restarts, std::uint64_t seed, double tol, int max_iter) {
    if (bases.empty()) throw SchemaError("optimizer needs at least one layer");
    if (restarts < 1) throw SchemaError("optimizer needs at least one restart");
    const std::size_t dim = bases.size();
    const StringTableBuilder builder(enc);
    const CorrelationMatrix vac = vacuum_state(enc);
    Objective obj{&enc, &target, &builder, &vac, bases};

    gsl_multimin_function fn;
    fn.n = dim;
    fn.f = &negated_overlap;
    fn.params = &obj;

    OptimizeResult best;
    best.objective = -1.0;
    for (int r = 0; r < restarts; ++r) {
        Rng rng = substream(seed, static_cast<std::uint64_t>(r), stream_purpose::optimizer);
        std::unique_ptr<gsl_vector, VectorDeleter> x(gsl_vector_alloc(dim));
        std::unique_ptr<gsl_vector, VectorDeleter> step(gsl_vector_alloc(dim));
        for (std::size_t k = 0; k < dim; ++k) {
            gsl_vector_set(x.get(), k, rng.uniform() - 0.5);
            gsl_vector_set(step.get(), k, 0.2);
        }
        std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> m(
            gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dim));
        gsl_multimin_fminimizer_set(m.get(), &fn, x.get(), step.get());

        int status = GSL_CONTINUE;
        for (int it = 0; it < max_iter && status == GSL_CONTINUE; ++it) {
            if (gsl_multimin_fminimizer_iterate(m.get())) break;
            status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(m.get()), tol);
        }
        const double value = -gsl_multimin_fminimizer_minimum(m.get());
        if (value > best.objective) {
            best.objective = value;
            best.angles.assign(dim, 0.0);
            for (std::size_t k = 0; k < dim; ++k) best.angles[k] = gsl_vector_get(gsl_multimin_fminimizer_x(m.get()), k);
            best.converged = status == GSL_SUCCESS;
        }
    }
    best.evaluations = obj.evaluations;
    best.restarts = restarts;
    return best;
}

}  // namespace kfs
