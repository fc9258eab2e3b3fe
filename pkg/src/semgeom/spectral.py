"""Graph-Laplacian spectral embedding of neighbor graphs.

The kNN graph is symmetrized by union with binary weights; embedding
coordinates are the eigenvectors of the (optionally symmetric
normalized) Laplacian for the smallest nonzero eigenvalues.
"""

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import eigsh

from .errors import DisconnectedGraph
from .types import NeighborTable

DENSE_LIMIT = 5000


def knn_graph(table: NeighborTable) -> sparse.csr_matrix:
    """Undirected binary adjacency: edge iff either endpoint lists the other."""
    n, k = table.n, table.k
    rows = np.repeat(np.arange(n), k)
    cols = table.indices.ravel()
    A = sparse.coo_matrix((np.ones(n * k), (rows, cols)), shape=(n, n)).tocsr()
    A = A.maximum(A.T)
    A.data[:] = 1.0
    return A


def _laplacian(A, normalized):
    deg = np.asarray(A.sum(axis=1)).ravel()
    D = sparse.diags(deg)
    L = D - A
    if normalized:
        inv_sqrt = sparse.diags(1.0 / np.sqrt(np.maximum(deg, 1e-300)))
        L = inv_sqrt @ L @ inv_sqrt
    return L


def spectral_embedding(adjacency, out_dims: int, normalized: bool = False):
    """n x out_dims coordinates from the smallest nonzero Laplacian modes.

    Sign fixed by making each eigenvector's largest-magnitude entry
    positive. Raises DisconnectedGraph with the component count if the
    graph is not connected.
    """
    A = sparse.csr_matrix(adjacency)
    n = A.shape[0]
    if out_dims < 1 or out_dims >= n:
        raise ValueError("need 1 <= out_dims < n")
    n_comp, _ = connected_components(A, directed=False)
    if n_comp > 1:
        raise DisconnectedGraph(n_comp)
    L = _laplacian(A, normalized)
    m = out_dims + 1  # skip the constant (zero-eigenvalue) mode
    if n <= DENSE_LIMIT:
        evals, evecs = np.linalg.eigh(L.toarray())
        evals, evecs = evals[:m], evecs[:, :m]
    else:
        evals, evecs = eigsh(L, k=m, sigma=0.0, which="LM")
        order = np.argsort(evals)
        evals, evecs = evals[order], evecs[:, order]
    coords = evecs[:, 1 : out_dims + 1]
    # fix sign: largest-magnitude entry positive
    pivot = np.argmax(np.abs(coords), axis=0)
    signs = np.sign(coords[pivot, np.arange(coords.shape[1])])
    signs[signs == 0] = 1.0
    return coords * signs, evals[1 : out_dims + 1]
