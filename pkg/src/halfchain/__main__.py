from halfchain.cli import main

main()
