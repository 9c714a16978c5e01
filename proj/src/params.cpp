#include "gnp/params.hpp"

#include <cmath>

#include "gnp/binio.hpp"

namespace gnp {

GnpParams init_gnp_params(ModelKind kind, std::size_t walk_steps, std::size_t rep_dim,
                          std::size_t user_feat_dim, std::size_t item_feat_dim, std::size_t hidden_dim,
                          int mlp_depth, std::uint64_t seed) {
    GnpParams p;
    p.kind = kind;
    p.rep_dim = rep_dim;
    if (kind == ModelKind::gnp) {
        p.adaptive = init_adaptive_weights(walk_steps);
    } else {
        p.adaptive.user_weights = {1.0};
        p.adaptive.item_weights = {1.0};
    }
    Rng rng(seed);
    p.user_mlp = make_mlp(rep_dim + user_feat_dim, hidden_dim, rep_dim, mlp_depth, rng);
    p.item_mlp = make_mlp(rep_dim + item_feat_dim, hidden_dim, rep_dim, mlp_depth, rng);
    return p;
}

GnpParams zeros_like(const GnpParams& params) {
    GnpParams z;
    z.kind = params.kind;
    z.rep_dim = params.rep_dim;
    z.adaptive.user_weights.assign(params.adaptive.user_weights.size(), 0.0);
    z.adaptive.item_weights.assign(params.adaptive.item_weights.size(), 0.0);
    z.user_mlp = zeros_like(params.user_mlp);
    z.item_mlp = zeros_like(params.item_mlp);
    return z;
}

namespace {

template <typename Params, typename Span>
std::vector<Span> tensors_impl(Params& p) {
    std::vector<Span> out;
    if (p.kind == ModelKind::gnp) {
        out.push_back(Span(p.adaptive.user_weights));
        out.push_back(Span(p.adaptive.item_weights));
    }
    for (auto* mlp : {&p.user_mlp, &p.item_mlp}) {
        for (auto& layer : mlp->layers) {
            out.push_back(Span(layer.weight.data));
            out.push_back(Span(layer.bias));
        }
    }
    return out;
}

} // namespace

std::vector<std::span<double>> param_tensors(GnpParams& params) {
    return tensors_impl<GnpParams, std::span<double>>(params);
}

std::vector<std::span<const double>> param_tensors(const GnpParams& params) {
    return tensors_impl<const GnpParams, std::span<const double>>(params);
}

bool all_finite(const GnpParams& params) {
    for (const auto& t : param_tensors(params)) {
        for (double v : t) {
            if (!std::isfinite(v)) return false;
        }
    }
    return true;
}

namespace {

constexpr char kMagic[4] = {'G', 'N', 'P', 'C'};
constexpr std::uint32_t kVersion = 1;

void write_f32_vec(std::ostream& out, std::span<const double> v) {
    for (double x : v) write_pod(out, static_cast<float>(x));
}

void read_f32_vec(std::istream& in, std::span<double> v, const std::string& path) {
    for (double& x : v) x = static_cast<double>(read_pod<float>(in, path));
}

void write_mlp(std::ostream& out, const Mlp& mlp) {
    write_pod(out, static_cast<std::uint32_t>(mlp.layers.size()));
    for (const auto& layer : mlp.layers) {
        write_pod(out, static_cast<std::uint32_t>(layer.weight.rows));
        write_pod(out, static_cast<std::uint32_t>(layer.weight.cols));
        write_f32_vec(out, layer.weight.data);
        write_f32_vec(out, layer.bias);
    }
}

Mlp read_mlp(std::istream& in, const std::string& path) {
    Mlp mlp;
    const auto n_layers = read_pod<std::uint32_t>(in, path);
    for (std::uint32_t l = 0; l < n_layers; ++l) {
        Mlp::Layer layer;
        const auto rows = read_pod<std::uint32_t>(in, path);
        const auto cols = read_pod<std::uint32_t>(in, path);
        layer.weight = MatD(rows, cols);
        read_f32_vec(in, layer.weight.data, path);
        layer.bias.assign(rows, 0.0);
        read_f32_vec(in, layer.bias, path);
        mlp.layers.push_back(std::move(layer));
    }
    if (!mlp.layers.empty()) {
        mlp.in_dim = mlp.layers.front().weight.cols;
        mlp.out_dim = mlp.layers.back().weight.rows;
    }
    return mlp;
}

} // namespace

void save_checkpoint(const std::string& path, const GnpParams& params) {
    std::ofstream out = open_out(path);
    out.write(kMagic, 4);
    write_pod(out, kVersion);
    write_pod(out, static_cast<std::uint32_t>(params.kind));
    write_pod(out, static_cast<std::uint32_t>(params.adaptive.user_weights.size() - 1));
    write_pod(out, static_cast<std::uint32_t>(params.rep_dim));
    write_f32_vec(out, params.adaptive.user_weights);
    write_f32_vec(out, params.adaptive.item_weights);
    write_mlp(out, params.user_mlp);
    write_mlp(out, params.item_mlp);
    if (!out) throw DataError("write failed: " + path);
}

GnpParams load_checkpoint(const std::string& path) {
    std::ifstream in = open_in(path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) throw DataError(path + ": not a checkpoint file");
    const auto version = read_pod<std::uint32_t>(in, path);
    if (version != kVersion) throw DataError(path + ": unsupported checkpoint version");
    GnpParams p;
    p.kind = static_cast<ModelKind>(read_pod<std::uint32_t>(in, path));
    const auto depth = read_pod<std::uint32_t>(in, path);
    p.rep_dim = read_pod<std::uint32_t>(in, path);
    p.adaptive.user_weights.assign(depth + 1, 0.0);
    p.adaptive.item_weights.assign(depth + 1, 0.0);
    read_f32_vec(in, p.adaptive.user_weights, path);
    read_f32_vec(in, p.adaptive.item_weights, path);
    p.user_mlp = read_mlp(in, path);
    p.item_mlp = read_mlp(in, path);
    return p;
}

} // namespace gnp
