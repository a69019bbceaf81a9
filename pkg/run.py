from polarlens import create_cli
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Create command-line application
cli = create_cli()

if __name__ == '__main__':
    cli()
