#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace harmlat {

using Offset = std::vector<int>;

// V_n = c / |n|^alpha for n != 0 and V_0 = onSite (Euclidean norm).
struct PowerTail {
    double alpha = 3;
    double c = 0;
    double onSite = 0;
};

struct BlockStencil {
    std::map<Offset, double> entries;
    std::optional<PowerTail> tail;

    bool empty() const { return entries.empty() && !tail; }
    double coefficient(const Offset& n) const;
    // largest |n|_inf among finite entries; -1 when the block has a tail
    int range() const;
    bool point_symmetric(double tol = 1e-14) const;
};

enum class Block { Q, P, QP };

struct CouplingStencil {
    int dimension = 1;
    BlockStencil Q, P, QP;

    const BlockStencil& block(Block b) const;
    BlockStencil& block(Block b);
    bool has_tail() const { return Q.tail || P.tail || QP.tail; }
    int range() const;
    // throws InvalidStencil / NonSummable
    void validate() const;
    CouplingStencil scaled(double s) const;
};

std::string block_name(Block b);

// Ignoring constant offsets: the bound of sum_{|n| > nmax} |c| |n|^{-alpha}.
struct TailCutoff {
    long nmax = 0;
    double bound = 0;
};
TailCutoff tail_cutoff(const PowerTail& tail, int dimension, double target = 1e-12);

nlohmann::json to_json(const CouplingStencil& s);
CouplingStencil stencil_from_json(const nlohmann::json& j);

}  // namespace harmlat
