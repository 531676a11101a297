#include "huffdrift/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace huffdrift {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    // Trim to the shortest representation that round-trips.
    for (int prec = 1; prec < 17; ++prec) {
        char shorter[40];
        std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(shorter, "%lf", &back);
        if (back == v) return shorter;
    }
    return buf;
}

void write_features_csv(const std::string& path, const std::vector<FeatureVec>& features) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write feature CSV: " + path);
    std::size_t dim = features.empty() ? 15 : features.front().size();
    out << "t";
    for (std::size_t d = 1; d <= dim; ++d) out << ",f" << d;
    out << "\n";
    for (std::size_t t = 0; t < features.size(); ++t) {
        out << (t + 1);
        for (double v : features[t]) out << "," << format_double(v);
        out << "\n";
    }
    if (!out) throw std::runtime_error("write failed for feature CSV: " + path);
}

std::vector<FeatureVec> read_features_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open feature CSV: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("feature CSV is empty: " + path);
    if (line.rfind("t,f1", 0) != 0)
        throw std::runtime_error("feature CSV header must start with t,f1..: " + path);

    std::vector<FeatureVec> features;
    std::size_t dim = 0;
    long row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        FeatureVec v;
        bool first = true;
        while (std::getline(ss, cell, ',')) {
            if (first) { // frame index column
                first = false;
                continue;
            }
            try {
                v.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw std::runtime_error("feature CSV row " + std::to_string(row) +
                                         ": bad number '" + cell + "'");
            }
        }
        if (dim == 0) dim = v.size();
        if (v.empty() || v.size() != dim)
            throw std::runtime_error("feature CSV row " + std::to_string(row) +
                                     ": inconsistent dimension");
        features.push_back(std::move(v));
    }
    return features;
}

void write_labels_csv(const std::string& path, const std::vector<LabelInterval>& intervals) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write labels CSV: " + path);
    out << "start_s,end_s,label\n";
    for (const LabelInterval& iv : intervals)
        out << format_double(iv.start_s) << "," << format_double(iv.end_s) << ",anomaly\n";
    if (!out) throw std::runtime_error("write failed for labels CSV: " + path);
}

std::vector<LabelInterval> read_labels_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open labels CSV: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("labels CSV is empty: " + path);
    if (line != "start_s,end_s,label")
        throw std::runtime_error("labels CSV header must be start_s,end_s,label: " + path);

    std::vector<LabelInterval> out;
    long row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string a, b, label;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, label))
            throw std::runtime_error("labels CSV row " + std::to_string(row) + ": malformed");
        if (label != "anomaly")
            throw std::runtime_error("labels CSV row " + std::to_string(row) +
                                     ": unknown label '" + label + "'");
        LabelInterval iv;
        try {
            iv.start_s = std::stod(a);
            iv.end_s = std::stod(b);
        } catch (const std::exception&) {
            throw std::runtime_error("labels CSV row " + std::to_string(row) + ": bad number");
        }
        if (!(iv.end_s > iv.start_s))
            throw std::runtime_error("labels CSV row " + std::to_string(row) +
                                     ": end_s must exceed start_s");
        out.push_back(iv);
    }
    return out;
}

}  // namespace huffdrift
