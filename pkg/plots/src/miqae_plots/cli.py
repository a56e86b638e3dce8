"""`plots` command: render one figure from harness CSV output."""

import sys

import click

from .figures import FIGURE_KINDS, FigureSpec, SchemaError, render


@click.command()
@click.option("--kind", type=click.Choice(sorted(FIGURE_KINDS)), required=True)
@click.option("--in", "inputs", type=click.Path(exists=True), multiple=True,
              required=True, help="Input CSV(s); repeat for multiple files.")
@click.option("--out", "output", type=click.Path(), required=True,
              help="Output image (.png or .svg).")
@click.option("--log-x/--linear-x", "log_x", default=None,
              help="Override the kind's default x scale.")
@click.option("--log-y/--linear-y", "log_y", default=None,
              help="Override the kind's default y scale.")
def main(kind, inputs, output, log_x, log_y):
    """Render a figure from the estimation harness's CSV exports."""
    try:
        spec = FigureSpec(kind=kind, inputs=tuple(inputs), output=output,
                          log_x=log_x, log_y=log_y)
        path = render(spec)
    except (SchemaError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(f"wrote {path}")


if __name__ == "__main__":
    main()
