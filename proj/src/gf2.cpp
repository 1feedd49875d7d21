#include "bivect/gf2.hpp"

#include "bivect/scalars.hpp"

namespace bivect::gf2 {

namespace {

struct Row {
    Bits lhs;
    Bits combination;
    bool rhs;
};

Bits row_bits(int num_variables, const Equation& eq) {
    Bits b(static_cast<std::size_t>(num_variables));
    for (int v : eq.variables) {
        if (v < 0 || v >= num_variables) throw DomainError("gf2: variable out of range");
        b.flip(static_cast<std::size_t>(v));
    }
    return b;
}

}  // namespace

Outcome solve(int num_variables, const std::vector<Equation>& equations) {
    const std::size_t m = equations.size();
    std::vector<Row> rows;
    rows.reserve(m);
    for (std::size_t r = 0; r < m; ++r) {
        Bits comb(m);
        comb.set(r);
        rows.push_back({row_bits(num_variables, equations[r]), std::move(comb), equations[r].rhs});
    }

    std::vector<int> pivot_col_of_row;
    std::size_t rank = 0;
    for (int col = 0; col < num_variables && rank < m; ++col) {
        std::size_t p = rank;
        while (p < m && !rows[p].lhs.test(static_cast<std::size_t>(col))) ++p;
        if (p == m) continue;
        std::swap(rows[p], rows[rank]);
        for (std::size_t r = 0; r < m; ++r) {
            if (r == rank || !rows[r].lhs.test(static_cast<std::size_t>(col))) continue;
            rows[r].lhs ^= rows[rank].lhs;
            rows[r].combination ^= rows[rank].combination;
            rows[r].rhs = rows[r].rhs != rows[rank].rhs;
        }
        pivot_col_of_row.push_back(col);
        ++rank;
    }

    for (std::size_t r = rank; r < m; ++r) {
        if (!rows[r].rhs) continue;
        Certificate cert;
        for (auto i = rows[r].combination.find_first(); i != Bits::npos;
             i = rows[r].combination.find_next(i))
            cert.equations.push_back(static_cast<int>(i));
        return cert;
    }

    // Reduced row echelon form: each pivot row fixes its pivot variable.
    Bits x(static_cast<std::size_t>(num_variables));
    for (std::size_t r = 0; r < rank; ++r)
        if (rows[r].rhs) x.set(static_cast<std::size_t>(pivot_col_of_row[r]));
    return x;
}

bool verify_certificate(int num_variables, const std::vector<Equation>& equations,
                        const Certificate& cert) {
    if (cert.equations.empty()) return false;
    Bits lhs(static_cast<std::size_t>(num_variables));
    bool rhs = false;
    for (int e : cert.equations) {
        if (e < 0 || static_cast<std::size_t>(e) >= equations.size()) return false;
        lhs ^= row_bits(num_variables, equations[static_cast<std::size_t>(e)]);
        rhs = rhs != equations[static_cast<std::size_t>(e)].rhs;
    }
    return lhs.none() && rhs;
}

}  // namespace bivect::gf2
