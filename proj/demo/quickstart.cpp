// Train a two-layer network on the sine-vs-chirp fixture and print the
// learned layer coefficients and test accuracy.

#include <cstdio>

#include "nsn/data.hpp"
#include "nsn/train.hpp"

int main() {
    const auto data = nsn::make_synthetic("sine-chirp", 512, 64, 0);
    const auto [train_set, test_set] = nsn::stratified_split(data, 0.8, 0);
    const auto [fit_set, val_set] = nsn::stratified_split(train_set, 0.8, 0);

    nsn::ModelConfig cfg;
    cfg.series_length = data.length;
    cfg.num_classes = data.num_classes;
    cfg.num_layers = 2;
    const nsn::Network net(cfg, 0);

    nsn::TrainSchedule schedule;
    schedule.epochs = 50;
    schedule.batch_size = 8;
    schedule.adam.lr = 1e-2;
    const auto result = nsn::train(net, fit_set, val_set, schedule, [](const nsn::EpochRecord& e) {
        if (e.epoch % 10 == 0)
            std::printf("epoch %3zu  train loss %.4f  val acc %.3f\n", e.epoch, e.train_loss, e.val_acc);
    });

    const auto& layers = result.net.layers();
    for (std::size_t i = 0; i < layers.size(); ++i)
        std::printf("layer %zu  alpha %+.4f  beta2 %+.4f  gamma %+.4f\n", i, layers[i].alpha, layers[i].beta2,
                    layers[i].gamma);
    const auto eval = nsn::evaluate(result.net, test_set);
    std::printf("test accuracy %.3f on %zu series\n", eval.accuracy, test_set.size());
    return 0;
}
