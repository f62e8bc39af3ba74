"""Binary chain persistence.

Layout (all little-endian):

    magic    8 bytes  b"GHSCHN01"
    header   u32 p, u32 burnin, u32 nmc, u32 thin, u64 seed, u64 flags
    [f64 fixed_tau]   present iff flags bit 0 is set
    payload  nmc * p(p+1)/2 f64, per-draw upper triangle incl. diagonal,
             row-major
    footer   8-byte BLAKE2b checksum of everything before it

Draws are symmetric by construction, so the triangle round-trips bitwise.
"""

import hashlib
import struct

import numpy as np

from .errors import ArchiveCorruptionError, ArchiveFormatError, ParameterError
from .gibbs import Chain, GhsConfig

MAGIC = b"GHSCHN01"
_HEADER = struct.Struct("<IIIIQQ")
_FLAG_FIXED_TAU = 1


def _checksum(data: bytes) -> bytes:
    return hashlib.blake2b(data, digest_size=8).digest()


def save_chain(chain: Chain, path) -> None:
    """Write ``chain`` to ``path``. Requires dense draw storage."""
    if chain.draws is None:
        raise ParameterError(
            "archive payload requires full draws; sketch-mode chains cannot be saved"
        )
    p = chain.p
    cfg = chain.config
    flags = _FLAG_FIXED_TAU if cfg.fixed_tau is not None else 0
    body = bytearray()
    body += MAGIC
    body += _HEADER.pack(p, cfg.burnin, cfg.nmc, cfg.thin, chain.rng_seed, flags)
    if cfg.fixed_tau is not None:
        body += struct.pack("<d", cfg.fixed_tau)
    iu = np.triu_indices(p)
    payload = np.ascontiguousarray(chain.draws[:, iu[0], iu[1]], dtype="<f8")
    body += payload.tobytes()
    body += _checksum(bytes(body))
    with open(path, "wb") as fh:
        fh.write(bytes(body))


def load_chain(path) -> Chain:
    """Read a chain archive, validating magic and checksum."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < len(MAGIC) or data[: len(MAGIC)] != MAGIC:
        raise ArchiveFormatError("bad magic tag; not a chain archive")
    off = len(MAGIC)
    if len(data) < off + _HEADER.size + 8:
        raise ArchiveCorruptionError("archive truncated before header")
    p, burnin, nmc, thin, seed, flags = _HEADER.unpack_from(data, off)
    off += _HEADER.size
    fixed_tau = None
    if flags & _FLAG_FIXED_TAU:
        if len(data) < off + 8:
            raise ArchiveCorruptionError("archive truncated in header extension")
        (fixed_tau,) = struct.unpack_from("<d", data, off)
        off += 8
    n_tri = p * (p + 1) // 2
    payload_bytes = nmc * n_tri * 8
    expected = off + payload_bytes + 8
    if len(data) != expected:
        raise ArchiveCorruptionError(
            f"archive length {len(data)} != expected {expected}"
        )
    if _checksum(data[:-8]) != data[-8:]:
        raise ArchiveCorruptionError("checksum mismatch")
    tri = np.frombuffer(data, dtype="<f8", count=nmc * n_tri, offset=off)
    tri = tri.reshape(nmc, n_tri)
    iu = np.triu_indices(p)
    draws = np.zeros((nmc, p, p))
    draws[:, iu[0], iu[1]] = tri
    draws[:, iu[1], iu[0]] = tri
    cfg = GhsConfig(burnin=burnin, nmc=nmc, thin=thin, fixed_tau=fixed_tau)
    return Chain(
        p=p,
        config=cfg,
        rng_seed=seed,
        draws=draws,
        mean=draws.mean(axis=0),
    )
