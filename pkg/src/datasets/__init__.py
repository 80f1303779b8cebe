"""
Dataset ingestion (IDX), optical patch geometry and edge-detection utilities.
"""

from src.datasets.idx import ImageSet, load_idx, write_idx, find_dataset, load_dataset
from src.datasets.patches import PatchMatrix, extract_patches, batch_patches, assemble_patches
from src.datasets.edges import EdgeResult, edge_detect, binarize, edge_image, LAPLACIAN_KERNEL
from src.datasets.images import read_image, write_image

__all__ = [
    'ImageSet',
    'load_idx',
    'write_idx',
    'find_dataset',
    'load_dataset',
    'PatchMatrix',
    'extract_patches',
    'batch_patches',
    'assemble_patches',
    'EdgeResult',
    'edge_detect',
    'binarize',
    'edge_image',
    'LAPLACIAN_KERNEL',
    'read_image',
    'write_image'
]
