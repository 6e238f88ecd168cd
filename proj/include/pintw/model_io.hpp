#ifndef PINTW_MODEL_IO_HPP_
#define PINTW_MODEL_IO_HPP_

#include <string>

#include "pintw/pca.hpp"
#include "pintw/trainer.hpp"

namespace pintw {

/// Versioned JSON schema; doubles round-trip exactly, so a reloaded model
/// predicts bit-identically.
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

void save_multiclass(const MulticlassModel& model, const std::string& path);
MulticlassModel load_multiclass(const std::string& path);

/// Either flavor, tagged by a "type" field.
bool model_file_is_multiclass(const std::string& path);

void save_pca_basis(const PCABasis& basis, const std::string& path);
PCABasis load_pca_basis(const std::string& path);

}  // namespace pintw

#endif  // PINTW_MODEL_IO_HPP_
