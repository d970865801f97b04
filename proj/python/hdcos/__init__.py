"""Two-party secure computation engine for cosine/Hadamard-Diagonal networks."""

from hdcos._core import (
    CapabilityError,
    Dataset,
    DesyncError,
    Model,
    PoolExhaustedError,
    decode,
    encode,
    fwht,
    gaussian_kernel,
    hadamard,
    hd_matvec,
    init_model,
    load_mnist_idx,
    load_model,
    mpc_cosine,
    mpc_hd_layer,
    mpc_mul,
    mpc_predict,
    mpc_relu_polyfit3,
    mpc_square,
    reconstruct,
    relu_polyfit3_coeffs,
    rff_features,
    split,
    split_dataset,
    subsample,
    synth_gaussians,
    train,
)

__all__ = [
    "CapabilityError",
    "Dataset",
    "DesyncError",
    "Model",
    "PoolExhaustedError",
    "decode",
    "encode",
    "fwht",
    "gaussian_kernel",
    "hadamard",
    "hd_matvec",
    "init_model",
    "load_mnist_idx",
    "load_model",
    "mpc_cosine",
    "mpc_hd_layer",
    "mpc_mul",
    "mpc_predict",
    "mpc_relu_polyfit3",
    "mpc_square",
    "reconstruct",
    "relu_polyfit3_coeffs",
    "rff_features",
    "split",
    "split_dataset",
    "subsample",
    "synth_gaussians",
    "train",
]

__version__ = "0.1.0"
