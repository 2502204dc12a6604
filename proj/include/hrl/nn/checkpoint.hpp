#pragma once

#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "hrl/error.hpp"
#include "hrl/nn/mlp.hpp"

namespace hrl::nn {

// Checkpoint layout (text, version 1):
//
//   hrl-mlp-checkpoint,1
//   layers,<n0>,<n1>,...,<nL>
//   layer,kind,row,col,value
//   0,W,0,0,<value>
//   ...
//   0,b,3,0,<value>
//
// `kind` is W (weight at [row][col]) or b (bias at [row], col always 0).
// Every parameter appears exactly once; values use round-trip precision.
inline constexpr int kCheckpointVersion = 1;

inline void write_checkpoint(std::ostream& out, const MlpSpec& spec, const MlpParams& params) {
    if (!params.matches(spec)) throw InvalidArgument("checkpoint: parameters do not match spec");
    out << "hrl-mlp-checkpoint," << kCheckpointVersion << '\n';
    out << "layers";
    for (std::size_t n : spec.layer_sizes) out << ',' << n;
    out << '\n' << "layer,kind,row,col,value\n";
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        const auto& layer = params.layers[l];
        for (std::size_t r = 0; r < layer.out; ++r)
            for (std::size_t c = 0; c < layer.in; ++c) out << l << ",W," << r << ',' << c << ',' << layer.w(r, c) << '\n';
        for (std::size_t r = 0; r < layer.out; ++r) out << l << ",b," << r << ",0," << layer.bias[r] << '\n';
    }
}

struct Checkpoint {
    MlpSpec spec;
    MlpParams params;
};

inline Checkpoint read_checkpoint(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "hrl-mlp-checkpoint," + std::to_string(kCheckpointVersion))
        throw ParseError("checkpoint: unsupported header '" + line + "'");
    if (!std::getline(in, line) || line.rfind("layers,", 0) != 0) throw ParseError("checkpoint: missing layers line");
    Checkpoint cp;
    {
        std::istringstream ss(line.substr(7));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                cp.spec.layer_sizes.push_back(std::stoul(tok));
            } catch (const std::exception&) {
                throw ParseError("checkpoint: bad layer size '" + tok + "'");
            }
        }
    }
    try {
        cp.spec.validate();
    } catch (const InvalidArgument& e) {
        throw ParseError(std::string("checkpoint: ") + e.what());
    }
    if (!std::getline(in, line) || line != "layer,kind,row,col,value") throw ParseError("checkpoint: missing column header");

    cp.params = MlpParams::zeros(cp.spec);
    std::size_t seen = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::size_t l{}, r{}, c{};
        char kind{}, s1{}, s2{}, s3{}, s4{};
        double v{};
        if (!(ss >> l >> s1 >> kind >> s2 >> r >> s3 >> c >> s4 >> v) || s1 != ',' || s2 != ',' || s3 != ',' || s4 != ',')
            throw ParseError("checkpoint: bad row '" + line + "'");
        if (l >= cp.params.layers.size()) throw ParseError("checkpoint: layer index out of range");
        auto& layer = cp.params.layers[l];
        if (kind == 'W') {
            if (r >= layer.out || c >= layer.in) throw ParseError("checkpoint: weight index out of range");
            layer.w(r, c) = v;
        } else if (kind == 'b') {
            if (r >= layer.out || c != 0) throw ParseError("checkpoint: bias index out of range");
            layer.bias[r] = v;
        } else {
            throw ParseError("checkpoint: unknown parameter kind");
        }
        ++seen;
    }
    if (seen != cp.params.parameter_count()) throw ParseError("checkpoint: parameter count mismatch");
    return cp;
}

} // namespace hrl::nn
