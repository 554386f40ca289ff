"""Command-line subcommands, discovered by `specgwl.loader`"""
