#include "harmlat/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "harmlat/errors.hpp"

namespace harmlat {

namespace {

double norm2(const Offset& n) {
    double s = 0;
    for (int v : n) s += static_cast<double>(v) * v;
    return std::sqrt(s);
}

Offset negate(const Offset& n) {
    Offset m(n);
    for (int& v : m) v = -v;
    return m;
}

}  // namespace

double BlockStencil::coefficient(const Offset& n) const {
    double v = 0;
    if (auto it = entries.find(n); it != entries.end()) v += it->second;
    if (tail) {
        double r = norm2(n);
        v += r == 0 ? tail->onSite : tail->c / std::pow(r, tail->alpha);
    }
    return v;
}

int BlockStencil::range() const {
    if (tail) return -1;
    int r = 0;
    for (const auto& [n, v] : entries)
        for (int c : n) r = std::max(r, std::abs(c));
    return r;
}

bool BlockStencil::point_symmetric(double tol) const {
    for (const auto& [n, v] : entries) {
        auto it = entries.find(negate(n));
        double w = it == entries.end() ? 0.0 : it->second;
        if (std::abs(v - w) > tol * std::max(1.0, std::abs(v))) return false;
    }
    return true;
}

const BlockStencil& CouplingStencil::block(Block b) const {
    return b == Block::Q ? Q : b == Block::P ? P : QP;
}

BlockStencil& CouplingStencil::block(Block b) { return b == Block::Q ? Q : b == Block::P ? P : QP; }

int CouplingStencil::range() const {
    int r = 0;
    for (auto b : {Block::Q, Block::P, Block::QP}) {
        int k = block(b).range();
        if (k < 0) return -1;
        r = std::max(r, k);
    }
    return r;
}

void CouplingStencil::validate() const {
    if (dimension < 1 || dimension > 3) throw InvalidStencil("dimension must be 1, 2 or 3");
    for (auto b : {Block::Q, Block::P, Block::QP}) {
        const auto& blk = block(b);
        for (const auto& [n, v] : blk.entries) {
            if (static_cast<int>(n.size()) != dimension)
                throw InvalidStencil("offset length differs from dimension in block " + block_name(b));
            if (!std::isfinite(v)) throw InvalidStencil("non-finite coefficient in block " + block_name(b));
        }
        if (blk.tail && blk.tail->alpha <= dimension)
            throw NonSummable("power-law exponent alpha must exceed the dimension");
    }
    if (!Q.point_symmetric()) throw InvalidStencil("Q block is not symmetric under n -> -n");
    if (!P.point_symmetric()) throw InvalidStencil("P block is not symmetric under n -> -n");
}

CouplingStencil CouplingStencil::scaled(double s) const {
    CouplingStencil out = *this;
    for (auto b : {Block::Q, Block::P, Block::QP}) {
        auto& blk = out.block(b);
        for (auto& [n, v] : blk.entries) v *= s;
        if (blk.tail) {
            blk.tail->c *= s;
            blk.tail->onSite *= s;
        }
    }
    return out;
}

std::string block_name(Block b) { return b == Block::Q ? "Q" : b == Block::P ? "P" : "QP"; }

TailCutoff tail_cutoff(const PowerTail& tail, int dimension, double target) {
    TailCutoff t;
    double a = tail.alpha, c = std::abs(tail.c);
    if (c == 0) return t;
    if (dimension == 1) {
        // sum_{n > m} 2|c| n^{-a} <= 2|c| m^{1-a} / (a - 1)
        constexpr long cap = 1L << 24;
        double m = std::pow(2 * c / ((a - 1) * target), 1 / (a - 1));
        t.nmax = static_cast<long>(std::min<double>(cap, std::ceil(m)));
        t.bound = 2 * c * std::pow(static_cast<double>(t.nmax), 1 - a) / (a - 1);
        return t;
    }
    // cube |n|_inf <= m holds every |n|_2 <= m; surface area S_d r^{d-1}
    double surface = dimension == 2 ? 2 * std::numbers::pi : 4 * std::numbers::pi;
    long cap = dimension == 2 ? 2047 : 127;
    double m = 1 + std::pow(c * surface / ((a - dimension) * target), 1 / (a - dimension));
    t.nmax = static_cast<long>(std::min<double>(static_cast<double>(cap), std::ceil(m)));
    t.bound = c * surface * std::pow(static_cast<double>(t.nmax) - 1, dimension - a) / (a - dimension);
    return t;
}

namespace {

nlohmann::json block_to_json(const BlockStencil& b) {
    nlohmann::json j;
    j["entries"] = nlohmann::json::array();
    for (const auto& [n, v] : b.entries) j["entries"].push_back({{"offset", n}, {"value", v}});
    if (b.tail) j["tail"] = {{"alpha", b.tail->alpha}, {"c", b.tail->c}, {"onSite", b.tail->onSite}};
    return j;
}

BlockStencil block_from_json(const nlohmann::json& j) {
    BlockStencil b;
    if (j.contains("entries"))
        for (const auto& e : j.at("entries")) {
            Offset n = e.at("offset").get<Offset>();
            b.entries[n] += e.at("value").get<double>();
        }
    if (j.contains("tail") && !j.at("tail").is_null()) {
        const auto& t = j.at("tail");
        b.tail = PowerTail{t.at("alpha").get<double>(), t.at("c").get<double>(), t.value("onSite", 0.0)};
    }
    return b;
}

}  // namespace

nlohmann::json to_json(const CouplingStencil& s) {
    return {{"dimension", s.dimension},
            {"blocks", {{"Q", block_to_json(s.Q)}, {"P", block_to_json(s.P)}, {"QP", block_to_json(s.QP)}}}};
}

CouplingStencil stencil_from_json(const nlohmann::json& j) {
    CouplingStencil s;
    try {
        s.dimension = j.at("dimension").get<int>();
        const auto& blocks = j.at("blocks");
        if (blocks.contains("Q")) s.Q = block_from_json(blocks.at("Q"));
        if (blocks.contains("P")) s.P = block_from_json(blocks.at("P"));
        if (blocks.contains("QP")) s.QP = block_from_json(blocks.at("QP"));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidStencil(std::string("malformed stencil document: ") + e.what());
    }
    s.validate();
    return s;
}

}  // namespace harmlat
