#include <cmath>

#include "huffdrift/features.hpp"
#include "huffdrift/io.hpp"
#include "huffdrift/pipeline.hpp"

namespace huffdrift {

// Runs the configured tree model over the input and returns the final tree
// snapshot. The AGMM baseline has no tree to dump.
std::string run_dump_tree(const RunConfig& config) {
    config.validate();
    RunMode mode = parse_mode(config.mode);
    if (mode == RunMode::agmm)
        throw std::invalid_argument("dump-tree supports modes proposed and fixed_tree only");

    std::vector<FeatureVec> features;
    {
        const std::string& path = config.input;
        bool wav = path.size() >= 4 &&
                   (path.compare(path.size() - 4, 4, ".wav") == 0 ||
                    path.compare(path.size() - 4, 4, ".WAV") == 0);
        if (wav) {
            AudioData audio = read_wav_mono16(path);
            FeatureExtractor extractor;
            for (const AudioFrame& frame : split_frames(audio, config.frame_seconds))
                features.push_back(extractor.extract(frame));
        } else {
            features = read_features_csv(path);
        }
    }
    std::size_t limit = features.size();
    if (config.limit_fraction < 1.0)
        limit = static_cast<std::size_t>(
            std::floor(config.limit_fraction * static_cast<double>(features.size())));

    if (mode == RunMode::proposed) {
        DetectorModel model(config.dimension, config.update_params(), config.merge);
        for (std::size_t i = 0; i < limit; ++i) model.process_frame(features[i]);
        return model.tree().snapshot();
    }
    OnlineNormalizer norm(config.dimension);
    FixedTreeModel model(config.fixed_n, config.update_params());
    for (std::size_t i = 0; i < limit; ++i) model.step(norm.normalize(features[i]));
    return model.tree().snapshot();
}

}  // namespace huffdrift
