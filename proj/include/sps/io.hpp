#pragma once
// JSON form of circuits.

#include <json.hpp>

#include "sps/circuit.hpp"

namespace sps {

using json = nlohmann::json;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline json scalar_to_json(const Field& F, const Scalar& s) {
    auto c = F.coeffs(s);
    if (c.empty()) c.push_back(0);
    return json(c);
}

inline json circuit_to_json(const SpsCircuit& c) {
    json j;
    j["q"] = c.F->q;
    j["ext_degree"] = c.F->k;
    j["modulus"] = c.F->mod;
    j["n"] = c.n;
    j["d"] = c.d;
    j["gates"] = json::array();
    for (auto& g : c.gates) {
        std::vector<LinearForm> fs = g.factors;
        std::sort(fs.begin(), fs.end());
        j["gates"].push_back({{"coeff", scalar_to_json(*c.F, g.coeff)}, {"factors", fs}});
    }
    return j;
}

inline SpsCircuit circuit_from_json(const json& j) {
    try {
        uint32_t q = j.at("q").get<uint32_t>();
        int k = j.at("ext_degree").get<int>();
        if (!is_prime(q)) throw ParseError("q is not prime");
        FieldPtr F;
        if (j.contains("modulus")) {
            auto m = j.at("modulus").get<std::vector<uint32_t>>();
            if (int(m.size()) != k + 1) throw ParseError("modulus degree does not match ext_degree");
            if (k > 1 && !fq::is_irreducible(m, q)) throw ParseError("modulus is not irreducible");
            F = std::make_shared<Field>(q, m);
        } else {
            F = build_extension(q, k);
        }
        SpsCircuit c{F, j.at("n").get<int>(), j.at("d").get<int>(), {}};
        for (auto& g : j.at("gates")) {
            auto co = g.at("coeff").get<std::vector<uint32_t>>();
            Gate gate{F->from_coeffs(co), g.at("factors").get<std::vector<LinearForm>>()};
            for (auto& l : gate.factors)
                for (auto& v : l)
                    if (v >= q) throw ParseError("coefficient not reduced mod q");
            c.gates.push_back(gate);
        }
        validate(c);
        return c;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed circuit: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("invalid circuit: ") + e.what());
    }
}

}  // namespace sps
