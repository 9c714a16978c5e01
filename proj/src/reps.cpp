#include "gnp/reps.hpp"

#include "gnp/binio.hpp"

namespace gnp {

void write_reps_cache(const std::string& path, const LayerRepsTable& table) {
    std::ofstream out = open_out(path);
    write_pod(out, static_cast<std::uint32_t>(table.n_nodes));
    write_pod(out, static_cast<std::uint32_t>(table.depth));
    write_pod(out, static_cast<std::uint32_t>(table.dim));
    write_span<float>(out, table.data.data);
    if (!out) throw DataError("write failed: " + path);
}

LayerRepsTable read_reps_cache(const std::string& path) {
    std::ifstream in = open_in(path);
    const auto n = read_pod<std::uint32_t>(in, path);
    const auto depth = read_pod<std::uint32_t>(in, path);
    const auto dim = read_pod<std::uint32_t>(in, path);
    if (dim == 0) throw DataError(path + ": zero dimension in reps cache");
    LayerRepsTable table(n, depth, dim);
    read_into<float>(in, table.data.data, path);
    return table;
}

} // namespace gnp
