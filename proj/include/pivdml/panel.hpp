#ifndef PIVDML_PANEL_HPP
#define PIVDML_PANEL_HPP

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "numeric.hpp"
#include "rng.hpp"

namespace pivdml {

// Long-format panel: one row per (unit, time) observation.
struct PanelData {
    std::vector<std::string> unit;
    std::vector<long long> time;
    std::vector<double> y;
    std::vector<double> d;
    std::vector<std::vector<double>> z;   // one vector per instrument column
    std::vector<std::vector<double>> x;   // one vector per control column
    std::vector<std::string> cluster;     // empty => cluster by unit

    std::vector<std::string> z_names;
    std::vector<std::string> x_names;

    std::size_t n_rows() const { return y.size(); }
    int n_instruments() const { return static_cast<int>(z.size()); }
    int n_controls() const { return static_cast<int>(x.size()); }
};

struct PanelSchema {
    std::string unit;
    std::string time;
    std::string y;
    std::string d;
    std::vector<std::string> z;
    std::vector<std::string> x;
    std::string cluster;   // optional, empty => cluster by unit
};

struct LoadReport {
    std::size_t rows_read = 0;
    std::size_t rows_dropped_missing = 0;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == delim) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

inline bool is_missing_token(const std::string& s) {
    if (s.empty()) return true;
    return s == "NA" || s == "na" || s == "NaN" || s == "nan" || s == "." || s == "NULL";
}

inline bool parse_double(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = s.data() + s.size();
    auto [p, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && p == e && std::isfinite(out);
}

inline bool parse_longlong(const std::string& s, long long& out) {
    const char* b = s.data();
    const char* e = s.data() + s.size();
    auto [p, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && p == e;
}

} // namespace detail

// Loads a delimited text file with a header row into long panel format.
// Rows with missing values in any required column are dropped and counted.
// Duplicate (unit, time) pairs are rejected.
inline PanelData load_panel(const std::string& path, const PanelSchema& schema,
                            LoadReport* report = nullptr, char delim = ',') {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open input file: " + path);

    std::string header;
    if (!std::getline(in, header)) throw DataError("empty input file: " + path);
    if (!header.empty() && header.back() == '\r') header.pop_back();
    std::vector<std::string> cols = detail::split_line(header, delim);

    std::unordered_map<std::string, int> colidx;
    for (int i = 0; i < static_cast<int>(cols.size()); ++i) colidx[cols[i]] = i;

    auto need = [&](const std::string& name) {
        auto it = colidx.find(name);
        if (it == colidx.end()) throw DataError("column not found in header: " + name);
        return it->second;
    };

    int iu = need(schema.unit);
    int it_ = need(schema.time);
    int iy = need(schema.y);
    int id = need(schema.d);
    std::vector<int> iz, ix;
    for (const auto& name : schema.z) iz.push_back(need(name));
    for (const auto& name : schema.x) ix.push_back(need(name));
    int ic = -1;
    if (!schema.cluster.empty()) ic = need(schema.cluster);

    if (iz.empty()) throw DataError("at least one instrument column is required");

    PanelData out;
    out.z.resize(iz.size());
    out.x.resize(ix.size());
    out.z_names = schema.z;
    out.x_names = schema.x;

    LoadReport rep;
    std::map<std::pair<std::string, long long>, bool> seen;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::trim(line).empty()) continue;
        std::vector<std::string> f = detail::split_line(line, delim);
        if (f.size() != cols.size()) {
            throw DataError("line " + std::to_string(lineno) + ": expected " +
                            std::to_string(cols.size()) + " fields, got " +
                            std::to_string(f.size()));
        }
        ++rep.rows_read;

        bool missing = detail::is_missing_token(f[iu]) || detail::is_missing_token(f[it_]) ||
                       detail::is_missing_token(f[iy]) || detail::is_missing_token(f[id]);
        for (int j : iz) missing = missing || detail::is_missing_token(f[j]);
        for (int j : ix) missing = missing || detail::is_missing_token(f[j]);
        if (ic >= 0) missing = missing || detail::is_missing_token(f[ic]);
        if (missing) {
            ++rep.rows_dropped_missing;
            continue;
        }

        long long t;
        if (!detail::parse_longlong(f[it_], t)) {
            throw DataError("line " + std::to_string(lineno) + ": cannot parse time value '" + f[it_] + "'");
        }
        double yv, dv;
        if (!detail::parse_double(f[iy], yv)) {
            throw DataError("line " + std::to_string(lineno) + ": cannot parse numeric value in column " + schema.y);
        }
        if (!detail::parse_double(f[id], dv)) {
            throw DataError("line " + std::to_string(lineno) + ": cannot parse numeric value in column " + schema.d);
        }
        std::vector<double> zv(iz.size()), xv(ix.size());
        for (std::size_t j = 0; j < iz.size(); ++j) {
            if (!detail::parse_double(f[iz[j]], zv[j])) {
                throw DataError("line " + std::to_string(lineno) + ": cannot parse numeric value in column " + schema.z[j]);
            }
        }
        for (std::size_t j = 0; j < ix.size(); ++j) {
            if (!detail::parse_double(f[ix[j]], xv[j])) {
                throw DataError("line " + std::to_string(lineno) + ": cannot parse numeric value in column " + schema.x[j]);
            }
        }

        auto key = std::make_pair(f[iu], t);
        if (seen.count(key)) {
            throw DataError("duplicate (unit, time) observation: (" + f[iu] + ", " + std::to_string(t) + ")");
        }
        seen[key] = true;

        out.unit.push_back(f[iu]);
        out.time.push_back(t);
        out.y.push_back(yv);
        out.d.push_back(dv);
        for (std::size_t j = 0; j < iz.size(); ++j) out.z[j].push_back(zv[j]);
        for (std::size_t j = 0; j < ix.size(); ++j) out.x[j].push_back(xv[j]);
        out.cluster.push_back(ic >= 0 ? f[ic] : f[iu]);
    }

    if (out.n_rows() == 0) throw DataError("no usable rows in input file: " + path);
    std::unordered_map<std::string, int> unit_rows;
    int max_rows = 0;
    for (const auto& u : out.unit) max_rows = std::max(max_rows, ++unit_rows[u]);
    if (max_rows < 2) throw DataError("panel too short: every unit has fewer than two periods");
    if (report) *report = rep;
    return out;
}

// First-differenced data. Outcome, treatment and instruments are differenced
// across adjacent periods; controls are kept as the stacked pair of levels
// (current period, previous period) so that nonlinear functions of both
// levels can be learned.
struct FdData {
    int n = 0;   // differenced rows
    int p = 0;   // controls per period, xpair has 2p columns
    int r = 0;   // instruments

    std::vector<double> dy;
    std::vector<double> dd;
    std::vector<std::vector<double>> dz;      // r columns
    std::vector<std::vector<double>> xpair;   // 2p columns, current levels then lagged levels

    std::vector<int> unit;                    // unit index per row
    std::vector<int> cluster;                 // cluster index per row
    std::vector<long long> time;              // current period of each pair
    std::vector<std::string> unit_ids;
    std::vector<std::string> cluster_ids;
    std::vector<std::string> x_names;         // base control names

    int n_units() const { return static_cast<int>(unit_ids.size()); }
    int n_clusters() const { return static_cast<int>(cluster_ids.size()); }

    std::size_t units_without_pairs = 0;
};

// Builds first differences using adjacent observed periods within a unit
// whose time values differ by exactly one.
inline FdData first_difference(const PanelData& panel) {
    std::size_t n = panel.n_rows();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (panel.unit[a] != panel.unit[b]) return panel.unit[a] < panel.unit[b];
        return panel.time[a] < panel.time[b];
    });

    int p = panel.n_controls();
    int r = panel.n_instruments();

    FdData fd;
    fd.p = p;
    fd.r = r;
    fd.dz.resize(r);
    fd.xpair.resize(2 * p);
    fd.x_names = panel.x_names;

    std::unordered_map<std::string, int> unit_index;
    std::unordered_map<std::string, int> cluster_index;

    auto unit_id = [&](const std::string& u) {
        auto it = unit_index.find(u);
        if (it != unit_index.end()) return it->second;
        int id = static_cast<int>(fd.unit_ids.size());
        unit_index[u] = id;
        fd.unit_ids.push_back(u);
        return id;
    };
    auto cluster_id = [&](const std::string& c) {
        auto it = cluster_index.find(c);
        if (it != cluster_index.end()) return it->second;
        int id = static_cast<int>(fd.cluster_ids.size());
        cluster_index[c] = id;
        fd.cluster_ids.push_back(c);
        return id;
    };

    std::string cur_unit;
    bool unit_has_pair = false;
    std::size_t units_seen = 0;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t i = order[k];
        if (panel.unit[i] != cur_unit) {
            if (!cur_unit.empty() && !unit_has_pair) ++fd.units_without_pairs;
            cur_unit = panel.unit[i];
            unit_has_pair = false;
            ++units_seen;
            continue;
        }
        std::size_t prev = order[k - 1];
        if (panel.time[i] != panel.time[prev] + 1) continue;

        fd.dy.push_back(panel.y[i] - panel.y[prev]);
        fd.dd.push_back(panel.d[i] - panel.d[prev]);
        for (int j = 0; j < r; ++j) fd.dz[j].push_back(panel.z[j][i] - panel.z[j][prev]);
        for (int j = 0; j < p; ++j) {
            fd.xpair[j].push_back(panel.x[j][i]);
            fd.xpair[p + j].push_back(panel.x[j][prev]);
        }
        fd.unit.push_back(unit_id(panel.unit[i]));
        fd.cluster.push_back(cluster_id(panel.cluster.empty() ? panel.unit[i] : panel.cluster[i]));
        fd.time.push_back(panel.time[i]);
        unit_has_pair = true;
    }
    if (!cur_unit.empty() && !unit_has_pair) ++fd.units_without_pairs;

    fd.n = static_cast<int>(fd.dy.size());
    if (fd.n == 0) throw DataError("no differentiable pairs: no unit has two adjacent periods");
    return fd;
}

// Assigns units to K folds: seeded shuffle, then round robin, so fold sizes
// differ by at most one unit.
inline std::vector<int> block_kfold(int n_units, int K, std::uint64_t seed) {
    if (K < 2) throw DataError("number of folds must be at least 2");
    if (n_units < K) throw DataError("fewer units than folds");
    std::vector<int> idx(n_units);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(derive_seed(seed, 0x666f6c64ULL));
    rng.shuffle(idx);
    std::vector<int> fold(n_units);
    for (int i = 0; i < n_units; ++i) fold[idx[i]] = i % K;
    return fold;
}

// Shift-share instrument: region-level exposure-weighted aggregate of
// sector-level shifts, scaled by region size.
//   Z[region][t] = (1 / pop[region]) * sum_s shares[region][s] * shifts[s][t]
inline std::vector<std::vector<double>> build_shift_share(
    const std::vector<std::vector<double>>& shares,
    const std::vector<std::vector<double>>& shifts,
    const std::vector<double>& pop) {
    std::size_t R = shares.size();
    if (R == 0) throw DataError("shift-share: no regions");
    std::size_t S = shares[0].size();
    if (shifts.size() != S) throw DataError("shift-share: shares and shifts disagree on the number of sectors");
    if (pop.size() != R) throw DataError("shift-share: pop length must match region count");
    std::size_t T = shifts.empty() ? 0 : shifts[0].size();

    std::vector<std::vector<double>> Z(R, std::vector<double>(T, 0.0));
    for (std::size_t g = 0; g < R; ++g) {
        if (shares[g].size() != S) throw DataError("shift-share: ragged shares matrix");
        if (!(pop[g] > 0.0)) throw DataError("shift-share: pop must be positive");
        for (std::size_t s = 0; s < S; ++s) {
            if (shifts[s].size() != T) throw DataError("shift-share: ragged shifts matrix");
            double w = shares[g][s];
            for (std::size_t t = 0; t < T; ++t) Z[g][t] += w * shifts[s][t];
        }
        for (std::size_t t = 0; t < T; ++t) Z[g][t] /= pop[g];
    }
    return Z;
}

} // namespace pivdml

#endif
