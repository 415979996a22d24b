import argparse
import os


class EnvDefault(argparse.Action):
    # Source: https://stackoverflow.com/a/10551190/3813064
    def __init__(self, envvar, required=False, default=None, **kwargs):
        if envvar and envvar in os.environ:
            value = os.environ[envvar]
            converter = kwargs.get("type")
            default = converter(value) if converter is not None else value
        if required and default is not None:
            required = False
        super(EnvDefault, self).__init__(default=default, required=required, **kwargs)

    def __call__(self, parser, namespace, values, option_string=None):
        setattr(namespace, self.dest, values)
