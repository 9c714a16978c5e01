#include "gnp/interactions.hpp"

#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "gnp/binio.hpp"

namespace gnp {

namespace {

std::uint32_t remap(std::unordered_map<std::string, std::uint32_t>& table,
                    std::vector<std::string>& names, const std::string& original) {
    auto it = table.find(original);
    if (it != table.end()) return it->second;
    const auto dense = static_cast<std::uint32_t>(names.size());
    table.emplace(original, dense);
    names.push_back(original);
    return dense;
}

struct PairHash {
    std::size_t operator()(const std::pair<std::uint32_t, std::uint32_t>& p) const {
        return (static_cast<std::size_t>(p.first) << 32) ^ p.second;
    }
};

Dataset assemble(std::vector<std::pair<std::string, std::string>>&& raw_pairs) {
    Dataset ds;
    std::unordered_map<std::string, std::uint32_t> user_table, item_table;
    std::unordered_set<std::pair<std::uint32_t, std::uint32_t>, PairHash> seen;
    ds.interactions.reserve(raw_pairs.size());
    for (auto& [u, i] : raw_pairs) {
        const std::uint32_t uid = remap(user_table, ds.user_names, u);
        const std::uint32_t iid = remap(item_table, ds.item_names, i);
        if (seen.emplace(uid, iid).second) {
            ds.interactions.push_back({uid, iid});
        }
    }
    ds.n_users = static_cast<std::uint32_t>(ds.user_names.size());
    ds.n_items = static_cast<std::uint32_t>(ds.item_names.size());
    if (ds.interactions.empty()) throw DataError("empty dataset: no interactions ingested");
    return ds;
}

} // namespace

Dataset load_interactions(const std::string& path, InteractionFormat format) {
    std::vector<std::pair<std::string, std::string>> raw;
    if (format == InteractionFormat::tsv) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot open interactions file: " + path);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            const std::size_t tab = line.find('\t');
            if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size() ||
                line.find('\t', tab + 1) != std::string::npos) {
                throw DataError(path + ":" + std::to_string(line_no) + ": malformed row, expected `user<TAB>item`");
            }
            raw.emplace_back(line.substr(0, tab), line.substr(tab + 1));
        }
    } else {
        const std::vector<Interaction> pairs = read_interactions_binary(path);
        raw.reserve(pairs.size());
        for (const Interaction& p : pairs) {
            raw.emplace_back(std::to_string(p.user), std::to_string(p.item));
        }
    }
    return assemble(std::move(raw));
}

void write_interactions_binary(const std::string& path, const std::vector<Interaction>& interactions) {
    std::ofstream out = open_out(path);
    write_pod(out, static_cast<std::uint32_t>(interactions.size()));
    for (const Interaction& r : interactions) {
        write_pod(out, r.user);
        write_pod(out, r.item);
    }
    if (!out) throw DataError("write failed: " + path);
}

std::vector<Interaction> read_interactions_binary(const std::string& path) {
    std::ifstream in = open_in(path);
    const auto count = read_pod<std::uint32_t>(in, path);
    std::vector<Interaction> out(count);
    for (std::uint32_t k = 0; k < count; ++k) {
        out[k].user = read_pod<std::uint32_t>(in, path);
        out[k].item = read_pod<std::uint32_t>(in, path);
    }
    return out;
}

void write_interactions_tsv(const std::string& path, const std::vector<Interaction>& interactions) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot open for writing: " + path);
    for (const Interaction& r : interactions) {
        out << r.user << '\t' << r.item << '\n';
    }
    if (!out) throw DataError("write failed: " + path);
}

void write_id_map(const std::string& path, const std::vector<std::string>& names) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot open for writing: " + path);
    for (std::size_t i = 0; i < names.size(); ++i) {
        out << i << '\t' << names[i] << '\n';
    }
    if (!out) throw DataError("write failed: " + path);
}

void write_u32_list(const std::string& path, const std::vector<std::uint32_t>& ids) {
    std::ofstream out = open_out(path);
    write_pod(out, static_cast<std::uint32_t>(ids.size()));
    write_span<std::uint32_t>(out, ids);
    if (!out) throw DataError("write failed: " + path);
}

std::vector<std::uint32_t> read_u32_list(const std::string& path) {
    std::ifstream in = open_in(path);
    const auto count = read_pod<std::uint32_t>(in, path);
    std::vector<std::uint32_t> ids(count);
    read_into<std::uint32_t>(in, ids, path);
    return ids;
}

} // namespace gnp
