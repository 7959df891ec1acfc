#include "models/networks.hpp"

#include "earlywarn/error.hpp"
#include "earlywarn/numkit/lstm.hpp"

namespace earlywarn::detail {

using numkit::BatchNorm;
using numkit::Conv1d;
using numkit::Dense;
using numkit::Mode;
using numkit::NamedArray;
using numkit::Param;
using numkit::Tensor;

template <class T>
std::vector<NamedArray> Network<T>::export_arrays() {
  std::vector<NamedArray> out;
  for (const Param<T>* p : params()) out.push_back(numkit::to_named_array(*p));
  return out;
}

template <class T>
void Network<T>::import_arrays(std::span<const NamedArray> arrays) {
  for (Param<T>* p : params()) numkit::assign_from(lookup(arrays, p->name), p->value, p->shape);
}

template <class T>
const NamedArray& Network<T>::lookup(std::span<const NamedArray> arrays, const std::string& name) {
  for (const auto& a : arrays) {
    if (a.name == name) return a;
  }
  throw Error(ErrorCode::SchemaError, "model state has no array '" + name + "'");
}

namespace {

// conv -> batch norm -> ReLU blocks, global average pooling, dense softmax head.
template <class T>
class FcnNet final : public Network<T> {
 public:
  FcnNet(const FcnConfig& cfg, std::size_t channels, std::size_t classes)
      : head_("fcn.head", cfg.blocks.back().filters, classes) {
    std::size_t in = channels;
    for (std::size_t i = 0; i < cfg.blocks.size(); ++i) {
      const std::string prefix = "fcn.block" + std::to_string(i);
      convs_.emplace_back(prefix + ".conv", in, cfg.blocks[i].filters, cfg.blocks[i].kernel_size);
      norms_.emplace_back(prefix + ".bn", cfg.blocks[i].filters);
      in = cfg.blocks[i].filters;
    }
    activations_.resize(cfg.blocks.size());
  }

  void init(Rng& rng) override {
    for (auto& c : convs_) c.init(rng);
    head_.init(rng);
  }

  Tensor<T> forward(const Tensor<T>& x, Mode mode) override {
    time_steps_ = x.dim(1);
    Tensor<T> h = x;
    for (std::size_t i = 0; i < convs_.size(); ++i) {
      h = numkit::relu_forward(norms_[i].forward(convs_[i].forward(h), mode));
      activations_[i] = h;
    }
    return head_.forward(numkit::global_avg_pool_forward(h));
  }

  void backward(const Tensor<T>& dlogits) override {
    Tensor<T> d = numkit::global_avg_pool_backward(head_.backward(dlogits), time_steps_);
    for (std::size_t i = convs_.size(); i-- > 0;) {
      d = convs_[i].backward(norms_[i].backward(numkit::relu_backward(activations_[i], d)));
    }
  }

  std::vector<Param<T>*> params() override {
    std::vector<Param<T>*> out;
    for (std::size_t i = 0; i < convs_.size(); ++i) {
      for (auto* p : convs_[i].params()) out.push_back(p);
      for (auto* p : norms_[i].params()) out.push_back(p);
    }
    for (auto* p : head_.params()) out.push_back(p);
    return out;
  }

  std::vector<NamedArray> export_arrays() override {
    auto out = Network<T>::export_arrays();
    for (auto& bn : norms_) {
      const std::string prefix = bn.gamma.name.substr(0, bn.gamma.name.size() - 6);
      out.push_back(numkit::to_named_array(prefix + ".running_mean", bn.running_mean));
      out.push_back(numkit::to_named_array(prefix + ".running_var", bn.running_var));
    }
    return out;
  }

  void import_arrays(std::span<const NamedArray> arrays) override {
    Network<T>::import_arrays(arrays);
    for (auto& bn : norms_) {
      const std::string prefix = bn.gamma.name.substr(0, bn.gamma.name.size() - 6);
      const std::vector<std::size_t> shape{bn.running_mean.size()};
      numkit::assign_from(this->lookup(arrays, prefix + ".running_mean"), bn.running_mean, shape);
      numkit::assign_from(this->lookup(arrays, prefix + ".running_var"), bn.running_var, shape);
    }
  }

 private:
  std::vector<Conv1d<T>> convs_;
  std::vector<BatchNorm<T>> norms_;
  std::vector<Tensor<T>> activations_;
  Dense<T> head_;
  std::size_t time_steps_ = 0;
};

// Flattened (weeks x channels) input through ReLU dense layers.
template <class T>
class MlpNet final : public Network<T> {
 public:
  MlpNet(const MlpConfig& cfg, std::size_t features, std::size_t classes)
      : head_("mlp.head", cfg.hidden_layers.back(), classes) {
    std::size_t in = features;
    for (std::size_t i = 0; i < cfg.hidden_layers.size(); ++i) {
      hidden_.emplace_back("mlp.hidden" + std::to_string(i), in, cfg.hidden_layers[i]);
      in = cfg.hidden_layers[i];
    }
    activations_.resize(hidden_.size());
  }

  void init(Rng& rng) override {
    for (auto& d : hidden_) d.init(rng);
    head_.init(rng);
  }

  Tensor<T> forward(const Tensor<T>& x, Mode) override {
    input_shape_ = x.shape;
    Tensor<T> h({x.dim(0), x.size() / x.dim(0)}, x.data);
    for (std::size_t i = 0; i < hidden_.size(); ++i) {
      h = numkit::relu_forward(hidden_[i].forward(h));
      activations_[i] = h;
    }
    return head_.forward(h);
  }

  void backward(const Tensor<T>& dlogits) override {
    Tensor<T> d = head_.backward(dlogits);
    for (std::size_t i = hidden_.size(); i-- > 0;) {
      d = hidden_[i].backward(numkit::relu_backward(activations_[i], d));
    }
  }

  std::vector<Param<T>*> params() override {
    std::vector<Param<T>*> out;
    for (auto& d : hidden_) {
      for (auto* p : d.params()) out.push_back(p);
    }
    for (auto* p : head_.params()) out.push_back(p);
    return out;
  }

 private:
  std::vector<Dense<T>> hidden_;
  std::vector<Tensor<T>> activations_;
  Dense<T> head_;
  std::vector<std::size_t> input_shape_;
};

template <class T>
class LstmNet final : public Network<T> {
 public:
  LstmNet(const LstmConfig& cfg, std::size_t channels, std::size_t classes)
      : cell_("lstm.cell", channels, cfg.hidden_size), head_("lstm.head", cfg.hidden_size, classes) {}

  void init(Rng& rng) override {
    cell_.init(rng);
    head_.init(rng);
  }

  Tensor<T> forward(const Tensor<T>& x, Mode) override { return head_.forward(cell_.forward(x)); }

  void backward(const Tensor<T>& dlogits) override { cell_.backward(head_.backward(dlogits)); }

  std::vector<Param<T>*> params() override {
    std::vector<Param<T>*> out = cell_.params();
    for (auto* p : head_.params()) out.push_back(p);
    return out;
  }

 private:
  numkit::Lstm<T> cell_;
  Dense<T> head_;
};

}  // namespace

template <class T>
std::unique_ptr<Network<T>> make_network(const ModelSpec& spec, std::size_t weeks,
                                         std::size_t channels, std::size_t classes) {
  switch (spec.kind) {
    case ModelKind::Fcn:
      spec.fcn.validate();
      return std::make_unique<FcnNet<T>>(spec.fcn, channels, classes);
    case ModelKind::Mlp:
      spec.mlp.validate();
      return std::make_unique<MlpNet<T>>(spec.mlp, weeks * channels, classes);
    case ModelKind::Lstm:
      spec.lstm.validate();
      return std::make_unique<LstmNet<T>>(spec.lstm, channels, classes);
    default:
      throw Error(ErrorCode::InvalidConfig, spec.name() + " is not a neural model");
  }
}

template class Network<float>;
template class Network<double>;
template std::unique_ptr<Network<float>> make_network(const ModelSpec&, std::size_t, std::size_t,
                                                      std::size_t);
template std::unique_ptr<Network<double>> make_network(const ModelSpec&, std::size_t, std::size_t,
                                                       std::size_t);

}  // namespace earlywarn::detail
