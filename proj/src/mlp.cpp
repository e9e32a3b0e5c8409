#include "pairlearn/mlp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>

#include <json.hpp>

#include "pairlearn/numeric.hpp"
#include "pairlearn/rng.hpp"

namespace pairlearn {

namespace {

constexpr std::uint32_t kCheckpointVersion = 1;

void write_u32_le(std::ostream& out, std::uint32_t v) {
    unsigned char bytes[4];
    for (int i = 0; i < 4; ++i) bytes[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(bytes), 4);
}

std::uint32_t read_u32_le(std::istream& in) {
    unsigned char bytes[4];
    in.read(reinterpret_cast<char*>(bytes), 4);
    if (!in) throw FormatError("checkpoint: truncated header length");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
    return v;
}

void write_f64_le(std::ostream& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(bytes), 8);
}

double read_f64_le(std::istream& in) {
    unsigned char bytes[8];
    in.read(reinterpret_cast<char*>(bytes), 8);
    if (!in) throw FormatError("checkpoint: truncated parameter payload");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

} // namespace

void MlpSpec::validate() const {
    if (layer_sizes.size() < 2) {
        throw ConfigError("MlpSpec: need at least input dimension and output nodes");
    }
    for (std::size_t s : layer_sizes) {
        if (s == 0) throw ConfigError("MlpSpec: layer size 0 is degenerate");
    }
    if (layer_sizes.back() < 2) {
        throw ConfigError("MlpSpec: output nodes K must be >= 2");
    }
    if (activation != "relu") {
        throw ConfigError("MlpSpec: unsupported activation '" + activation + "'");
    }
}

std::size_t MlpSpec::param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 1; l < layer_sizes.size(); ++l) {
        n += layer_sizes[l] * layer_sizes[l - 1] + layer_sizes[l];
    }
    return n;
}

Mlp::Mlp(MlpSpec spec, ParameterVector params) : spec_(std::move(spec)), params_(std::move(params)) {
    spec_.validate();
    if (params_.total_len() != spec_.param_count()) {
        throw ContractError("Mlp: parameter count does not match spec");
    }
}

void Mlp::set_params(ParameterVector p) {
    params_.require_same_structure(p, "Mlp::set_params");
    params_ = std::move(p);
}

Mlp Mlp::build(const MlpSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    std::vector<ParamGroup> groups;
    for (std::size_t l = 1; l < spec.layer_sizes.size(); ++l) {
        const std::size_t fan_in = spec.layer_sizes[l - 1];
        const std::size_t fan_out = spec.layer_sizes[l];
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        ParamGroup w;
        w.name = "w" + std::to_string(l);
        w.rows = fan_out;
        w.cols = fan_in;
        w.values.resize(fan_out * fan_in);
        for (auto& v : w.values) v = rng.uniform(-bound, bound);
        groups.push_back(std::move(w));
        ParamGroup b;
        b.name = "b" + std::to_string(l);
        b.rows = 1;
        b.cols = fan_out;
        b.values.assign(fan_out, 0.0);
        groups.push_back(std::move(b));
    }
    return Mlp(spec, ParameterVector(std::move(groups)));
}

Matrix Mlp::predict(const Matrix& batch) const {
    if (batch.cols != spec_.input_dim()) {
        throw ContractError("Mlp::predict: feature dimension does not match spec");
    }
    const std::size_t layers = spec_.layer_sizes.size() - 1;
    Matrix h = batch;
    for (std::size_t l = 0; l < layers; ++l) {
        const ParamGroup& w = params_.group(2 * l);
        const ParamGroup& b = params_.group(2 * l + 1);
        Matrix z(h.rows, w.rows);
        for (std::size_t r = 0; r < h.rows; ++r) {
            for (std::size_t o = 0; o < w.rows; ++o) {
                double acc = 0.0;
                for (std::size_t i = 0; i < h.cols; ++i) acc += h(r, i) * w.values[o * w.cols + i];
                z(r, o) = acc + b.values[o];
            }
        }
        if (l + 1 < layers) {
            for (auto& v : z.data) v = v > 0.0 ? v : 0.0;
        } else {
            for (std::size_t r = 0; r < z.rows; ++r) {
                double m = z(r, 0);
                for (std::size_t c = 1; c < z.cols; ++c) m = std::max(m, z(r, c));
                for (std::size_t c = 0; c < z.cols; ++c) z(r, c) = std::exp(z(r, c) - m);
                const double denom = canonical_sum(z.row(r));
                for (std::size_t c = 0; c < z.cols; ++c) z(r, c) /= denom;
            }
        }
        h = std::move(z);
    }
    return h;
}

void Mlp::save_checkpoint(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("checkpoint: cannot open '" + path + "' for writing");
    nlohmann::json header;
    header["format_version"] = kCheckpointVersion;
    header["layer_sizes"] = spec_.layer_sizes;
    header["activation"] = spec_.activation;
    header["seed"] = spec_.seed;
    const std::string line = header.dump() + "\n";
    write_u32_le(out, static_cast<std::uint32_t>(line.size()));
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
    for (std::size_t g = 0; g < params_.group_count(); ++g) {
        for (double v : params_.group(g).values) write_f64_le(out, v);
    }
    if (!out) throw FormatError("checkpoint: write failed for '" + path + "'");
}

Mlp Mlp::load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("checkpoint: cannot open '" + path + "'");
    const std::uint32_t header_len = read_u32_le(in);
    if (header_len == 0 || header_len > 1 << 20) {
        throw FormatError("checkpoint: implausible header length");
    }
    std::string line(header_len, '\0');
    in.read(line.data(), header_len);
    if (!in) throw FormatError("checkpoint: truncated header");
    nlohmann::json header;
    MlpSpec spec;
    try {
        header = nlohmann::json::parse(line);
        if (!header.contains("format_version") ||
            header.at("format_version").get<std::uint32_t>() != kCheckpointVersion) {
            throw FormatError("checkpoint: unsupported format version");
        }
        spec.layer_sizes = header.at("layer_sizes").get<std::vector<std::size_t>>();
        spec.activation = header.at("activation").get<std::string>();
        spec.seed = header.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("checkpoint: bad header: ") + e.what());
    }
    try {
        spec.validate();
    } catch (const ConfigError& e) {
        throw FormatError(std::string("checkpoint: invalid spec in header: ") + e.what());
    }

    std::vector<ParamGroup> groups;
    for (std::size_t l = 1; l < spec.layer_sizes.size(); ++l) {
        ParamGroup w{"w" + std::to_string(l), spec.layer_sizes[l], spec.layer_sizes[l - 1], {}};
        w.values.resize(w.rows * w.cols);
        for (auto& v : w.values) v = read_f64_le(in);
        groups.push_back(std::move(w));
        ParamGroup b{"b" + std::to_string(l), 1, spec.layer_sizes[l], {}};
        b.values.resize(b.cols);
        for (auto& v : b.values) v = read_f64_le(in);
        groups.push_back(std::move(b));
    }
    char extra;
    if (in.read(&extra, 1)) {
        throw FormatError("checkpoint: trailing bytes after parameter payload");
    }
    return Mlp(spec, ParameterVector(std::move(groups)));
}

GraphParams lift_params(ad::Tape& tape, const ParameterVector& params, bool requires_grad) {
    GraphParams gp;
    gp.leaves.reserve(params.group_count());
    for (std::size_t g = 0; g < params.group_count(); ++g) {
        const ParamGroup& grp = params.group(g);
        Matrix m(grp.rows, grp.cols);
        m.data = grp.values;
        gp.leaves.push_back(tape.input(std::move(m), requires_grad));
    }
    return gp;
}

ad::ValuePtr mlp_forward(ad::Tape& tape, const MlpSpec& spec, const GraphParams& gp,
                         const Matrix& batch) {
    if (batch.cols != spec.input_dim()) {
        throw ContractError("mlp_forward: feature dimension does not match spec");
    }
    const std::size_t layers = spec.layer_sizes.size() - 1;
    if (gp.leaves.size() != 2 * layers) {
        throw ContractError("mlp_forward: parameter leaves do not match spec");
    }
    ad::ValuePtr h = tape.constant(batch);
    for (std::size_t l = 0; l < layers; ++l) {
        h = tape.affine(h, gp.leaves[2 * l], gp.leaves[2 * l + 1]);
        if (l + 1 < layers) h = tape.relu(h);
    }
    return tape.softmax_rows(h);
}

ParameterVector collect_gradients(const GraphParams& gp, const ParameterVector& like) {
    if (gp.leaves.size() != like.group_count()) {
        throw ContractError("collect_gradients: group count mismatch");
    }
    std::vector<ParamGroup> groups;
    groups.reserve(like.group_count());
    for (std::size_t g = 0; g < like.group_count(); ++g) {
        ParamGroup grp = like.group(g);
        grp.values = gp.leaves[g]->grad();
        groups.push_back(std::move(grp));
    }
    return ParameterVector(std::move(groups));
}

} // namespace pairlearn
