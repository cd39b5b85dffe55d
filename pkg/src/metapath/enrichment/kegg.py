"""KEGG ``link``/``list`` flat files and a caching REST fetcher."""

from __future__ import annotations

import logging
import os
import urllib.error
import urllib.request
from pathlib import Path

from ..errors import InputError, MalformedLine, OfflineError

LOG = logging.getLogger(__name__)

DEFAULT_BASE_URL = "https://rest.kegg.jp"
CACHE_ENV = "METAPATH_CACHE_DIR"


def _strip_prefix(identifier):
    # "hsa:3643" -> "3643", "path:hsa04910" -> "hsa04910"
    return identifier.split(":", 1)[1] if ":" in identifier else identifier


def _fields(text):
    for lineno, line in enumerate(text.split("\n"), start=1):
        line = line.rstrip("\r")
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
            raise MalformedLine(lineno, line)
        yield parts[0].strip(), parts[1].strip()


def parse_kegg_link(text):
    """``gene<TAB>path:pathway`` lines -> list of (gene_id, pathway_id).

    Duplicates are kept; aggregation is up to the caller.
    """
    return [(_strip_prefix(g), _strip_prefix(p)) for g, p in _fields(text)]


def parse_kegg_list(text, warnings=None):
    """``pathway<TAB>name`` lines -> {pathway_id: name}.

    A repeated id overwrites the earlier entry; if ``warnings`` is a list,
    one message is appended per overwrite.
    """
    names = {}
    for pid, name in _fields(text):
        pid = _strip_prefix(pid)
        if pid in names and warnings is not None:
            warnings.append(f"duplicate pathway id {pid!r}")
        names[pid] = name
    return names


def parse_kegg_list_counted(text):
    warnings = []
    names = parse_kegg_list(text, warnings)
    return names, len(warnings)


def default_cache_dir(cache_dir=None):
    if cache_dir:
        return Path(cache_dir)
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "metapath"


class KeggFetcher:
    """GET ``<base_url>/<path>`` with a verbatim on-disk cache keyed by path.

    Cache hits never touch the network; with ``offline=True`` a cache miss
    raises :class:`OfflineError` instead of fetching.
    """

    def __init__(self, base_url=DEFAULT_BASE_URL, cache_dir=None, offline=False, timeout=60.0):
        self.base_url = base_url.rstrip("/")
        self.cache_dir = default_cache_dir(cache_dir)
        self.offline = offline
        self.timeout = timeout
        self.network_requests = 0

    def _cache_path(self, path):
        parts = [p for p in path.strip("/").split("/") if p]
        if not parts or any(p in (".", "..") for p in parts):
            raise InputError(f"bad request path {path!r}")
        return self.cache_dir.joinpath(*parts)

    def get(self, path):
        cached = self._cache_path(path)
        if cached.is_file():
            LOG.debug("cache hit for %s", path)
            return cached.read_bytes().decode("utf-8")
        if self.offline:
            raise OfflineError(f"{path} is not cached and network access is disabled")
        url = f"{self.base_url}/{path.strip('/')}"
        LOG.info("fetching %s", url)
        self.network_requests += 1
        try:
            with urllib.request.urlopen(url, timeout=self.timeout) as resp:
                body = resp.read()
        except (urllib.error.URLError, OSError) as exc:
            raise InputError(f"fetching {url} failed: {exc}") from exc
        cached.parent.mkdir(parents=True, exist_ok=True)
        tmp = cached.with_name(cached.name + ".part")
        tmp.write_bytes(body)
        os.replace(tmp, cached)
        return body.decode("utf-8")

    def link_pathway(self, org):
        return self.get(f"link/pathway/{org}")

    def list_pathway(self, org):
        return self.get(f"list/pathway/{org}")
