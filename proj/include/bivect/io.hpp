#ifndef BIVECT_IO_HPP
#define BIVECT_IO_HPP

// JSON job files ("bivect/1"). Exact scalars are {"re": "p/q", "im": "p/q"},
// approximate ones [re, im] number pairs. Output is deterministic: object keys
// sorted, simplices and points in increasing order.

#include "bivect/connective.hpp"

#include <json.hpp>

#include <optional>
#include <variant>

namespace bivect::io {

using json = nlohmann::json;

inline constexpr const char* schema_version = "bivect/1";

/// Malformed or inconsistent input (as opposed to a mathematical failure).
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using AnyBundle = std::variant<std::monostate, ChartedBundle<ExactComplex>, ChartedBundle<ApproxComplex>>;

struct Job {
    bool exact = true;
    double tolerance = 1e-9;
    int rank = 0;
    std::optional<OrderedCover> cover;
    /// Present when the file carries dims (and coherency maps).
    AnyBundle bundle;
    std::optional<SignCochain> lift;
    std::optional<SignCochain> sign_cocycle;
    std::optional<SampledBase> base;
    std::map<Simplex, ConnectionField> seeds;
    std::vector<PathSpec> paths;
};

/// Throws SchemaError on anything that does not parse or cross-reference.
Job parse_job(const json& doc);
Job read_job(const std::string& path);
json write_job(const Job& job);

template <class Scalar>
json scalar_to_json(const Scalar& z);
json dims_to_json(const DimMatrix& d);
json simplex_to_json(const Simplex& s);
template <class Scalar>
json vmatrix_to_json(const VMatrix<Scalar>& f);
json cochain_to_json(const SignCochain& c);
json report_to_json(const BundleReport& r);
json field_to_json(const ConnectionField& f);

}  // namespace bivect::io

#endif  // BIVECT_IO_HPP
