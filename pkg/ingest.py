from gravrec.script import ingest

if __name__ == "__main__":
    ingest.main()
