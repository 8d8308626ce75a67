#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "csirl/errors.hpp"
#include "csirl/nn.hpp"

namespace csirl::nn {

// Textual network dump, format tag "csirl-ckpt-v1". One record per network:
// spec descriptor followed by the flat parameter array printed as hexfloats,
// which round-trip real64 losslessly.
struct Checkpoint {
    std::map<std::string, std::string> meta;
    std::vector<std::pair<std::string, ParamVector>> nets;

    const ParamVector& find(const std::string& name) const {
        for (const auto& [n, p] : nets)
            if (n == name) return p;
        throw InvalidInputError("checkpoint: no network named " + name);
    }

    void save(const std::string& path) const {
        std::ofstream f(path);
        if (!f) throw Error("checkpoint: cannot open " + path + " for writing");
        f << "csirl-ckpt-v1\n";
        for (const auto& [k, v] : meta) f << "meta " << k << " " << v << "\n";
        char buf[64];
        for (const auto& [name, p] : nets) {
            f << "net " << name << " " << p.spec.input_dim << " " << p.spec.hidden_dims.size();
            for (const int h : p.spec.hidden_dims) f << " " << h;
            f << " " << p.spec.output_dim << " " << to_string(p.spec.activation) << " " << p.values.size()
              << "\n";
            for (size_t i = 0; i < p.values.size(); ++i) {
                std::snprintf(buf, sizeof(buf), "%a", p.values[i]);
                f << buf << ((i % 8 == 7 || i + 1 == p.values.size()) ? "\n" : " ");
            }
        }
        f << "end\n";
        if (!f) throw Error("checkpoint: write to " + path + " failed");
    }

    static Checkpoint load(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw Error("checkpoint: cannot open " + path);
        std::string line;
        if (!std::getline(f, line) || line != "csirl-ckpt-v1")
            throw ParseError("checkpoint: missing csirl-ckpt-v1 format tag in " + path);

        Checkpoint ck;
        bool saw_end = false;
        while (std::getline(f, line)) {
            if (line.empty()) continue;
            std::istringstream ss(line);
            std::string tok;
            ss >> tok;
            if (tok == "end") {
                saw_end = true;
                break;
            }
            if (tok == "meta") {
                std::string k, v;
                ss >> k;
                std::getline(ss, v);
                if (!v.empty() && v.front() == ' ') v.erase(0, 1);
                ck.meta[k] = v;
                continue;
            }
            if (tok != "net") throw ParseError("checkpoint: unexpected record '" + tok + "'");
            std::string name;
            int in = 0, nh = 0;
            ss >> name >> in >> nh;
            MLPSpec spec;
            spec.input_dim = in;
            spec.hidden_dims.resize(nh);
            for (int i = 0; i < nh; ++i) ss >> spec.hidden_dims[i];
            std::string act;
            size_t count = 0;
            ss >> spec.output_dim >> act >> count;
            if (!ss) throw ParseError("checkpoint: malformed net header for '" + name + "'");
            spec.activation = activation_from_string(act);
            if (static_cast<int>(count) != spec.param_count())
                throw SchemaError("checkpoint: parameter count mismatch for '" + name + "'");

            ParamVector p{spec, std::vector<double>(count)};
            size_t got = 0;
            while (got < count) {
                std::string v;
                if (!(f >> v)) throw ParseError("checkpoint: truncated parameter block for '" + name + "'");
                char* endp = nullptr;
                p.values[got] = std::strtod(v.c_str(), &endp);
                if (endp == v.c_str() || *endp != '\0')
                    throw ParseError("checkpoint: bad parameter literal '" + v + "'");
                ++got;
            }
            f.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
            ck.nets.emplace_back(name, std::move(p));
        }
        if (!saw_end) throw ParseError("checkpoint: missing end marker (truncated file?)");
        return ck;
    }
};

}  // namespace csirl::nn
