#include "gnp/features.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "gnp/binio.hpp"

namespace gnp {

MatF load_features(const std::string& path, FeatureFormat format) {
    MatF m;
    if (format == FeatureFormat::text) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot open features file: " + path);
        std::size_t rows = 0, dim = 0;
        if (!(in >> rows >> dim)) throw DataError(path + ": missing `rows dim` header");
        if (dim == 0) throw DataError(path + ": feature dim must be > 0");
        m = MatF(rows, dim);
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                if (!(in >> m.at(i, j))) {
                    throw DataError(path + ": truncated feature matrix at row " + std::to_string(i));
                }
            }
        }
    } else {
        std::ifstream in = open_in(path);
        const auto rows = read_pod<std::uint32_t>(in, path);
        const auto dim = read_pod<std::uint32_t>(in, path);
        if (dim == 0) throw DataError(path + ": feature dim must be > 0");
        m = MatF(rows, dim);
        read_into<float>(in, m.data, path);
    }
    for (float v : m.data) {
        if (!std::isfinite(v)) throw DataError(path + ": non-finite feature value");
    }
    return m;
}

void save_features(const std::string& path, const MatF& features, FeatureFormat format) {
    if (format == FeatureFormat::text) {
        std::ofstream out(path, std::ios::trunc);
        if (!out) throw DataError("cannot open for writing: " + path);
        out << features.rows << ' ' << features.cols << '\n';
        out.precision(9);
        for (std::size_t i = 0; i < features.rows; ++i) {
            const auto row = features.row(i);
            for (std::size_t j = 0; j < row.size(); ++j) {
                out << (j ? " " : "") << row[j];
            }
            out << '\n';
        }
        if (!out) throw DataError("write failed: " + path);
    } else {
        std::ofstream out = open_out(path);
        write_pod(out, static_cast<std::uint32_t>(features.rows));
        write_pod(out, static_cast<std::uint32_t>(features.cols));
        write_span<float>(out, features.data);
        if (!out) throw DataError("write failed: " + path);
    }
}

MatF remap_features(const MatF& raw, const std::vector<std::string>& original_names) {
    MatF out(original_names.size(), raw.cols);
    for (std::size_t dense = 0; dense < original_names.size(); ++dense) {
        std::size_t original = 0;
        try {
            std::size_t pos = 0;
            original = std::stoull(original_names[dense], &pos);
            if (pos != original_names[dense].size()) throw std::invalid_argument("trailing chars");
        } catch (const std::exception&) {
            throw DataError("cannot align features: entity id '" + original_names[dense] +
                            "' is not an integer row index");
        }
        if (original >= raw.rows) {
            throw DataError("feature file has " + std::to_string(raw.rows) + " rows but entity id " +
                            original_names[dense] + " was seen in the interactions");
        }
        const auto src = raw.row(original);
        std::copy(src.begin(), src.end(), out.row(dense).begin());
    }
    return out;
}

void l2_normalize_rows(MatF& features) {
    for (std::size_t i = 0; i < features.rows; ++i) {
        auto row = features.row(i);
        double s = 0.0;
        for (float v : row) s += static_cast<double>(v) * v;
        if (s <= 0.0) continue;
        const auto inv = static_cast<float>(1.0 / std::sqrt(s));
        for (float& v : row) v *= inv;
    }
}

} // namespace gnp
