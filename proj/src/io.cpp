#include "cmsbm/io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <toml.hpp>

#include "cmsbm/error.hpp"

namespace cmsbm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& what) { throw Error(ErrorKind::SchemaMismatch, what); }

std::vector<double> number_list(const json& j, const char* key, std::size_t layers_hint) {
    if (!j.contains(key)) schema(std::string("missing field ") + key);
    const json& v = j.at(key);
    if (v.is_number()) {
        if (layers_hint == 0) schema(std::string(key) + " is a scalar but L is not given");
        return std::vector<double>(layers_hint, v.get<double>());
    }
    if (!v.is_array()) schema(std::string(key) + " must be a number or an array");
    return v.get<std::vector<double>>();
}

json toml_to_json(const toml::node& node) {
    if (auto t = node.as_table()) {
        json out = json::object();
        for (const auto& [k, v] : *t) out[std::string(k.str())] = toml_to_json(v);
        return out;
    }
    if (auto a = node.as_array()) {
        json out = json::array();
        for (const auto& v : *a) out.push_back(toml_to_json(v));
        return out;
    }
    if (auto v = node.as_integer()) return v->get();
    if (auto v = node.as_floating_point()) return v->get();
    if (auto v = node.as_boolean()) return v->get();
    if (auto v = node.as_string()) return v->get();
    schema("unsupported TOML value");
}

void put_u32(std::ostream& os, std::uint32_t v) {
    std::array<unsigned char, 4> b{};
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b.data()), 4);
}

std::uint32_t get_u32(const unsigned char* p) {
    return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) |
           (std::uint32_t{p[3]} << 24);
}

void put_f64(std::ostream& os, double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    std::array<unsigned char, 8> b{};
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
    os.write(reinterpret_cast<const char*>(b.data()), 8);
}

double get_f64(const unsigned char* p) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= std::uint64_t{p[i]} << (8 * i);
    return std::bit_cast<double>(bits);
}

}  // namespace

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

ModelParams params_from_json(const json& j) {
    if (!j.is_object()) schema("parameter file must hold an object");
    ModelParams p;
    try {
        p.n = j.at("n").get<std::size_t>();
        p.p = j.at("p").get<std::size_t>();
        p.mu = j.at("mu").get<double>();
        p.rho = j.at("rho").get<double>();
    } catch (const json::exception& e) {
        schema(std::string("parameter file: ") + e.what());
    }
    const std::size_t hint = j.contains("L") ? j.at("L").get<std::size_t>() : 0;
    p.lambda = number_list(j, "lambda", hint);
    p.epsilon = number_list(j, "epsilon", hint ? hint : p.lambda.size());
    if (hint && p.lambda.size() != hint) schema("lambda length differs from L");
    return p;
}

json params_to_json(const ModelParams& p) {
    return json{{"n", p.n}, {"p", p.p}, {"mu", p.mu}, {"rho", p.rho},
                {"lambda", p.lambda}, {"epsilon", p.epsilon}};
}

json parse_config_text(std::string_view text, bool as_toml) {
    if (as_toml) {
        try {
            return toml_to_json(toml::parse(text));
        } catch (const toml::parse_error& e) {
            schema(std::string("TOML: ") + std::string(e.description()));
        }
    }
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) schema("input is not valid JSON");
    return j;
}

ModelParams parse_params_text(std::string_view text, bool as_toml) {
    ModelParams p = params_from_json(parse_config_text(text, as_toml));
    validate_params(p);
    return p;
}

ModelParams load_params(const fs::path& path) {
    return parse_params_text(read_text(path), path.extension() == ".toml");
}

void write_matrix(const fs::path& path, const Eigen::MatrixXd& m, std::string_view magic) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out.write(magic.data(), 4);
    put_u32(out, static_cast<std::uint32_t>(m.rows()));
    put_u32(out, static_cast<std::uint32_t>(m.cols()));
    put_u32(out, 0);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index k = 0; k < m.cols(); ++k) put_f64(out, m(i, k));
}

Eigen::MatrixXd read_matrix(const fs::path& path, std::string_view magic) {
    const std::string raw = read_text(path);
    const auto* bytes = reinterpret_cast<const unsigned char*>(raw.data());
    if (raw.size() < 16 || std::memcmp(raw.data(), magic.data(), 4) != 0)
        schema(path.string() + ": bad magic, expected " + std::string(magic));
    const std::uint32_t rows = get_u32(bytes + 4), cols = get_u32(bytes + 8);
    if (raw.size() != 16 + static_cast<std::size_t>(rows) * cols * 8)
        schema(path.string() + ": payload size does not match header");
    Eigen::MatrixXd m(rows, cols);
    const unsigned char* q = bytes + 16;
    for (std::uint32_t i = 0; i < rows; ++i)
        for (std::uint32_t k = 0; k < cols; ++k, q += 8) m(i, k) = get_f64(q);
    return m;
}

void write_observation(const fs::path& dir, const Observation& obs) {
    fs::create_directories(dir);
    write_text(dir / "params.json", params_to_json(obs.params).dump(2) + "\n");
    json meta{{"hypothesis", obs.hypothesis == Hypothesis::Planted ? "P" : "Q"}, {"seed", obs.seed}};
    write_text(dir / "meta.json", meta.dump(2) + "\n");
    write_matrix(dir / "Y.bin", obs.y, kSpikedMagic);
    for (std::size_t l = 0; l < obs.layers.size(); ++l) {
        std::ostringstream ss;
        ss << "i,j\n";
        for (const auto& [i, j] : obs.layers[l].edges()) ss << i << ',' << j << '\n';
        write_text(dir / ("layer_" + std::to_string(l) + ".csv"), ss.str());
    }
    if (obs.truth) {
        const LatentState& s = *obs.truth;
        json t{{"x", s.x}, {"z", s.z}, {"u", std::vector<double>(s.u.data(), s.u.data() + s.u.size())}};
        write_text(dir / "truth.json", t.dump() + "\n");
    }
}

Observation read_observation(const fs::path& dir) {
    Observation obs;
    obs.params = load_params(dir / "params.json");
    if (fs::exists(dir / "meta.json")) {
        json meta = json::parse(read_text(dir / "meta.json"), nullptr, false);
        if (meta.is_discarded()) schema("meta.json is not valid JSON");
        obs.hypothesis = meta.value("hypothesis", "P") == "Q" ? Hypothesis::Null : Hypothesis::Planted;
        obs.seed = meta.value("seed", std::uint64_t{0});
    }
    obs.y = read_matrix(dir / "Y.bin", kSpikedMagic);
    if (obs.y.rows() != static_cast<Eigen::Index>(obs.params.n) ||
        obs.y.cols() != static_cast<Eigen::Index>(obs.params.p))
        schema("Y.bin shape disagrees with params.json");
    const auto n = static_cast<std::uint32_t>(obs.params.n);
    for (std::size_t l = 0; l < obs.params.layers(); ++l) {
        std::istringstream in(read_text(dir / ("layer_" + std::to_string(l) + ".csv")));
        std::string line;
        if (!std::getline(in, line) || line != "i,j") schema("layer csv must start with i,j");
        Graph g(n);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto comma = line.find(',');
            if (comma == std::string::npos) schema("malformed edge line: " + line);
            const unsigned long i = std::stoul(line.substr(0, comma));
            const unsigned long j = std::stoul(line.substr(comma + 1));
            if (i >= j || j >= n) schema("edge out of range or not ordered: " + line);
            g.add_edge(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
        }
        g.finalize();
        obs.layers.push_back(std::move(g));
    }
    if (fs::exists(dir / "truth.json")) {
        json t = json::parse(read_text(dir / "truth.json"), nullptr, false);
        if (t.is_discarded()) schema("truth.json is not valid JSON");
        LatentState s;
        s.x = t.at("x").get<std::vector<std::int8_t>>();
        s.z = t.at("z").get<std::vector<std::vector<std::int8_t>>>();
        auto u = t.at("u").get<std::vector<double>>();
        s.u = Eigen::Map<Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(u.size()));
        obs.truth = std::move(s);
    }
    return obs;
}

}  // namespace cmsbm
