#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Command-line entry point and run manifests."""

from gnflow.cli.manifest import RunManifest, read_manifest, write_manifest

__all__ = ['RunManifest', 'read_manifest', 'write_manifest', 'main']


def main(argv=None) -> int:
    from gnflow.cli.main import main as _main
    return _main(argv)
